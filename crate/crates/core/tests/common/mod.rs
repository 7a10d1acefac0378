//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive reduced forms of discriminant `d < 0` by exhaustive search.
pub fn brute_reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            if (b.abs() == a || a == c) && b < 0 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out.sort_unstable();
    out
}

/// Coefficients of `q prod (1 - q^n)^24` up to `q^n_max` by repeated multiplication.
///
/// Partial products have coefficients beyond `i128`, so the work is done modulo
/// `2^128`; the final coefficients are far below `2^127` and come out exact.
pub fn tau_by_product(n_max: usize) -> Vec<i128> {
    let mut p = vec![0i128; n_max];
    p[0] = 1;
    for k in 1..n_max {
        for _ in 0..24 {
            for i in (k..n_max).rev() {
                p[i] = p[i].wrapping_sub(p[i - k]);
            }
        }
    }
    let mut out = vec![0i128; n_max + 1];
    out[1..].copy_from_slice(&p);
    out
}

/// Coefficients of `eta(z)^2 eta(11z)^2` up to `q^n_max` by repeated multiplication.
pub fn level11_by_product(n_max: usize) -> Vec<i64> {
    let mut p = vec![0i64; n_max];
    p[0] = 1;
    for k in 1..n_max {
        for step in [k, 11 * k] {
            if step >= n_max {
                continue;
            }
            for _ in 0..2 {
                for i in (step..n_max).rev() {
                    p[i] -= p[i - step];
                }
            }
        }
    }
    let mut out = vec![0i64; n_max + 1];
    out[1..].copy_from_slice(&p);
    out
}

/// `sum_{d | n} (d0 / d)`: the number of ideals of norm `n` in the maximal order.
pub fn ideal_count(d0: i64, n: u64) -> i64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| kronecker(d0, d) as i64).sum()
}

/// Kronecker symbol `(a / n)` by quadratic reciprocity.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1;
    while n.is_multiple_of(2) {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// `tau(n)` for all `n <= n_max` from the values at primes, by the Hecke relations.
pub fn tau_from_primes(n_max: usize, tau_p: impl Fn(u64) -> i128) -> Vec<i128> {
    let mut t = vec![0i128; n_max + 1];
    t[1] = 1;
    for n in 2..=n_max {
        let p = (2..=n).find(|d| n % d == 0).unwrap();
        let (mut m, mut k) = (n, 0);
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let mut pp = vec![1i128, tau_p(p as u64)];
        for j in 2..=k {
            pp.push(pp[1] * pp[j - 1] - (p as i128).pow(11) * pp[j - 2]);
        }
        t[n] = pp[k] * t[m];
    }
    t
}
