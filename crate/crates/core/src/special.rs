//! Complex log-gamma, the Hurwitz zeta function and Dirichlet L-functions.
//!
//! `ln_gamma` uses the Stirling series after shifting the argument to
//! `|z| >= 15`, with reflection for `Re z < 1/2`. The Hurwitz zeta function is
//! evaluated by Euler–Maclaurin summation for `Re s >= -1` and through
//! Hurwitz's formula otherwise, which keeps the cancellation under control
//! for arguments far to the left of the critical strip.

use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_2, B_4, ..., B_40.
const BERNOULLI_EVEN: [f64; 20] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
];

/// `ln sin(w)`, stable for large `|Im w|`, defined up to a multiple of `2 pi i`.
fn ln_sin(w: C) -> C {
    if w.im < 0.0 {
        return ln_sin(w.conj()).conj();
    }
    let i = C::i();
    let e = (2.0 * i * w).exp();
    -i * w + (e - 1.0).ln() - C::new(std::f64::consts::LN_2, PI / 2.0)
}

/// Principal-branch-agnostic complex log-gamma: `exp(ln_gamma(z)) = Gamma(z)`.
///
/// Returns an infinite real part at the poles `z = 0, -1, -2, ...`.
pub fn ln_gamma(z: C) -> C {
    if z.re < 0.5 {
        let r = z.re.round();
        if z.im == 0.0 && z.re == r {
            return C::new(f64::INFINITY, 0.0);
        }
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return C::new(PI.ln(), 0.0) - ln_sin(PI * z) - ln_gamma(1.0 - z);
    }
    let mut z = z;
    let mut shift = C::new(0.0, 0.0);
    while z.norm() < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = C::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(12) {
        let k = (k + 1) as f64;
        series += pow * (*b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

pub fn gamma(z: C) -> C {
    ln_gamma(z).exp()
}

/// Hurwitz zeta `zeta(s, a)` for `0 < a <= 1` and `s != 1`.
pub fn hurwitz_zeta(s: C, a: f64) -> C {
    assert!(a > 0.0 && a <= 1.0, "hurwitz_zeta needs 0 < a <= 1");
    if s.re >= -1.0 {
        hurwitz_em(s, a)
    } else {
        hurwitz_reflected(s, a)
    }
}

fn hurwitz_em(s: C, a: f64) -> C {
    hurwitz_em_impl(s, a, true)
}

/// `(exp(-e * lx) - 1) / e`, with its limit `-lx` at `e = 0`.
fn pole_free_power(e: C, lx: f64) -> C {
    let u = e * lx;
    if u.norm() < 1e-3 {
        // -lx * (1 - u/2 + u^2/6 - u^3/24 + u^4/120)
        -lx * (1.0 - u / 2.0 + u * u / 6.0 - u * u * u / 24.0 + u * u * u * u / 120.0)
    } else {
        ((-u).exp() - 1.0) / e
    }
}

/// Euler–Maclaurin summation, accurate when `Re s` is not very negative.
/// With `with_pole = false` it returns `zeta(s, a) - 1/(s - 1)`.
fn hurwitz_em_impl(s: C, a: f64, with_pole: bool) -> C {
    let n = (20.0 + s.norm()).ceil() as usize;
    let mut sum = C::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let x_pow = (-s * lx).exp(); // x^{-s}
    sum += x_pow * 0.5;
    if with_pole {
        sum += x_pow * x / (s - 1.0);
    } else {
        // (x^{1-s} - 1) / (s - 1), regular at s = 1
        sum += pole_free_power(s - 1.0, lx);
    }
    // Sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut fact = 2.0; // (2j)!
    let mut xp = x_pow / x;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        let term = rising * xp * (*b / fact);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        let m = 2 * j as u32;
        rising *= (s + (m as f64 - 1.0)) * (s + m as f64);
        fact *= ((m + 1) * (m + 2)) as f64;
        xp /= x * x;
    }
    sum
}

/// Hurwitz's formula for `zeta(1 - s, h/k)` with rational `a = h/k`, falling
/// back to Euler–Maclaurin for irrational-looking `a`.
fn hurwitz_reflected(s1: C, a: f64) -> C {
    let (h, k) = match rational_approx(a) {
        Some(hk) => hk,
        None => return hurwitz_em(s1, a),
    };
    // s1 = 1 - s  =>  s = 1 - s1, with Re s > 2
    let s = 1.0 - s1;
    let i = C::i();
    let base = ln_gamma(s) - s * (2.0 * PI * k as f64).ln();
    let mut sum = C::new(0.0, 0.0);
    for r in 1..=k {
        let theta = PI * s / 2.0 - 2.0 * PI * (r as f64) * (h as f64) / (k as f64);
        let z = hurwitz_em(s, r as f64 / k as f64);
        let c = ((base + i * theta).exp() + (base - i * theta).exp()) * 0.5;
        sum += c * z;
    }
    2.0 * sum
}

fn rational_approx(a: f64) -> Option<(u64, u64)> {
    for k in 1..=5000u64 {
        let h = (a * k as f64).round();
        if (h / k as f64 - a).abs() < 1e-14 && h >= 1.0 {
            return Some((h as u64, k));
        }
    }
    None
}

/// Riemann zeta function at complex `s != 1`.
pub fn zeta(s: C) -> C {
    hurwitz_zeta(s, 1.0)
}

/// Dirichlet L-function `L(s, psi) = q^{-s} Sum_{a mod q} psi(a) zeta(s, a/q)`.
///
/// `values[a]` holds `psi(a)` for `a = 0..q`; imprimitive characters are fine.
pub fn dirichlet_l(s: C, values: &[C]) -> C {
    let q = values.len();
    if q == 1 {
        return zeta(s);
    }
    let mut sum = C::new(0.0, 0.0);
    if s.re >= -1.0 {
        // split off the common pole so that L(1, psi) is regular for nonprincipal psi
        let mut total = C::new(0.0, 0.0);
        for (a, v) in values.iter().enumerate().skip(1) {
            if v.norm() == 0.0 {
                continue;
            }
            total += v;
            sum += v * hurwitz_em_impl(s, a as f64 / q as f64, false);
        }
        if total.norm() > 1e-9 {
            sum += total / (s - 1.0);
        }
    } else {
        for (a, v) in values.iter().enumerate().skip(1) {
            if v.norm() == 0.0 {
                continue;
            }
            sum += v * hurwitz_zeta(s, a as f64 / q as f64);
        }
    }
    sum * (-s * (q as f64).ln()).exp()
}
