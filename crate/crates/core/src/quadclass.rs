//! Binary quadratic forms and class groups of imaginary quadratic orders.
//!
//! A [`Discriminant`] pairs a fundamental discriminant `d0 < 0` with a conductor
//! `c >= 1`; the order of conductor `c` has discriminant `c^2 d0`. Its Picard
//! group is realised as the set of primitive reduced forms of that discriminant
//! with Gauss composition, see [`ClassGroup`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::{ext_gcd, factor, gcd, is_fundamental_negative, kronecker};
use crate::error::{Error, Result};

/// Largest supported |c^2 d0|.
pub const MAX_ABS_DISC: i128 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant {
    pub d0: i64,
    pub c: u64,
}

impl Discriminant {
    pub fn new(d0: i64, c: u64) -> Result<Self> {
        if d0 >= 0 {
            return Err(Error::InvalidDiscriminant { d: d0, reason: "must be negative" });
        }
        let m = d0.rem_euclid(4);
        if m != 0 && m != 1 {
            return Err(Error::InvalidDiscriminant { d: d0, reason: "must be 0 or 1 mod 4" });
        }
        if !is_fundamental_negative(d0) {
            return Err(Error::InvalidDiscriminant { d: d0, reason: "not fundamental" });
        }
        if c == 0 {
            return Err(Error::InvalidDiscriminant { d: d0, reason: "conductor must be >= 1" });
        }
        let d = (c as i128) * (c as i128) * (d0 as i128);
        if -d > MAX_ABS_DISC {
            return Err(Error::DiscriminantTooLarge(d));
        }
        Ok(Self { d0, c })
    }

    pub fn fundamental(d0: i64) -> Result<Self> {
        Self::new(d0, 1)
    }

    /// Discriminant of the order, `c^2 d0`.
    pub fn d(&self) -> i64 {
        (self.c * self.c) as i64 * self.d0
    }

    /// Absolute discriminant of the field.
    pub fn abs_d0(&self) -> u64 {
        self.d0.unsigned_abs()
    }

    /// Number of roots of unity in the maximal order.
    pub fn w_field(&self) -> u64 {
        units_of(self.d0)
    }

    /// Number of units of the order of conductor `c`.
    pub fn w_order(&self) -> u64 {
        units_of(self.d())
    }

    /// The quadratic character attached to the field.
    pub fn eta(&self, n: u64) -> i32 {
        kronecker_eta(self.d0, n)
    }
}

fn units_of(d: i64) -> u64 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// The Kronecker symbol `(d0 / n)`.
pub fn kronecker_eta(d0: i64, n: u64) -> i32 {
    kronecker(d0, n)
}

/// A primitive positive definite form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let Self { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// Reduced representative of the class of `(a, b, c)`.
    pub fn reduce(a: i128, b: i128, c: i128) -> ReducedForm {
        let (mut a, mut b, mut c) = (a, b, c);
        loop {
            // normalise b into (-a, a]
            if b > a || b <= -a {
                let two_a = 2 * a;
                let k = (a - b).div_euclid(two_a);
                let nb = b + two_a * k;
                c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        ReducedForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    pub fn inverse(&self) -> ReducedForm {
        Self::reduce(self.a as i128, -(self.b as i128), self.c as i128)
    }

    /// Number of lattice points `(x, y) != 0` with `q(x, y) = n`.
    pub fn lattice_count(&self, n: u64) -> u64 {
        let mut count = 0u64;
        self.for_each_point(n, |_, _, v| {
            if v == n {
                count += 1;
            }
        });
        count
    }

    /// Visit every nonzero lattice point with `q(x, y) <= bound`, passing `(x, y, q(x, y))`.
    pub fn for_each_point<F: FnMut(i64, i64, u64)>(&self, bound: u64, mut f: F) {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let d = -(b * b - 4 * a * c); // |D| > 0
        let bound = bound as i128;
        // 4a q = (2ax + by)^2 + |D| y^2  =>  |y| <= sqrt(4 a bound / |D|)
        let ymax = crate::arith::isqrt((4 * a * bound / d) as u128) as i128 + 1;
        for y in -ymax..=ymax {
            let rest = 4 * a * bound - d * y * y;
            if rest < 0 {
                continue;
            }
            let r = crate::arith::isqrt(rest as u128) as i128;
            // |2ax + by| <= r
            let lo = (-r - b * y).div_euclid(2 * a) - 1;
            let hi = (r - b * y).div_euclid(2 * a) + 1;
            for x in lo..=hi {
                if x == 0 && y == 0 {
                    continue;
                }
                let v = a * x * x + b * x * y + c * y * y;
                if v <= bound {
                    f(x as i64, y as i64, v as u64);
                }
            }
        }
    }
}

/// All primitive reduced forms of discriminant `c^2 d0`, sorted by `(a, b, c)`.
pub fn reduced_forms(disc: &Discriminant) -> Vec<ReducedForm> {
    forms_of_discriminant(disc.d())
}

pub(crate) fn forms_of_discriminant(d: i64) -> Vec<ReducedForm> {
    let abs_d = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= abs_d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b), c) != 1 {
                continue;
            }
            out.push(ReducedForm { a, b, c });
        }
        a += 1;
    }
    out.sort();
    out
}

/// Gauss composition of two primitive forms of the same discriminant, reduced.
pub fn compose(disc: &Discriminant, f: &ReducedForm, g: &ReducedForm) -> Result<ReducedForm> {
    let d = disc.d();
    for h in [f, g] {
        if h.discriminant() != d {
            return Err(Error::MismatchedDiscriminant(h.discriminant(), d));
        }
    }
    Ok(compose_raw(f, g))
}

fn compose_raw(f: &ReducedForm, g: &ReducedForm) -> ReducedForm {
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1, _) = ext_gcd(a2, a1); // y1 a2 + _ a1 = d
    let (d1, x2, y2) = ext_gcd(s, d); // x2 s + y2 d = d1
    let y2 = -y2;
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    ReducedForm::reduce(a3, b3, c3)
}

/// Ring class number via Dedekind's formula.
pub fn ring_class_number(d0: i64, c: u64) -> Result<u64> {
    let disc = Discriminant::new(d0, c)?;
    let h_k = forms_of_discriminant(d0).len() as u64;
    if c == 1 {
        return Ok(h_k);
    }
    let mut num = h_k * c;
    for (p, _) in factor(c) {
        let e = kronecker_eta(d0, p) as i64;
        num = num / p * ((p as i64 - e) as u64);
    }
    let unit_index = disc.w_field() / 2;
    Ok(num / unit_index)
}

/// A finite abelian group of form classes with its full multiplication table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassGroup {
    pub disc: Discriminant,
    pub forms: Vec<ReducedForm>,
    pub identity: usize,
    pub comp: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub h: u64,
    /// Units of the order; equals the field's root-of-unity count when `c = 1`.
    pub w_k: u64,
}

impl ClassGroup {
    pub fn new(disc: Discriminant) -> Result<Self> {
        let forms = reduced_forms(&disc);
        let h = forms.len();
        let index_of = |f: &ReducedForm| forms.binary_search(f).expect("reduced form present");
        let identity = 0; // (1, b, c) sorts first
        let mut comp = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in i..h {
                let k = index_of(&compose_raw(&forms[i], &forms[j]));
                comp[i][j] = k;
                comp[j][i] = k;
            }
        }
        let inv = forms.iter().map(|f| index_of(&f.inverse())).collect();
        Ok(Self { w_k: disc.w_order(), disc, forms, identity, comp, inv, h: h as u64 })
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.comp[i][j]
    }

    pub fn pow(&self, i: usize, e: u64) -> usize {
        let mut r = self.identity;
        for _ in 0..e {
            r = self.comp[r][i];
        }
        r
    }

    pub fn element_order(&self, i: usize) -> u64 {
        let mut k = 1;
        let mut x = i;
        while x != self.identity {
            x = self.comp[x][i];
            k += 1;
        }
        k
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> u64 {
        (0..self.forms.len()).map(|i| self.element_order(i)).fold(1, |acc, o| acc / gcd(acc as i64, o as i64) as u64 * o)
    }

    pub fn index_of(&self, f: &ReducedForm) -> Option<usize> {
        self.forms.binary_search(f).ok()
    }

    /// Exhaustive check of the abelian group axioms on the composition table.
    pub fn check_group_law(&self) -> bool {
        let h = self.forms.len();
        for i in 0..h {
            if self.comp[self.identity][i] != i || self.comp[i][self.inv[i]] != self.identity {
                return false;
            }
            for j in 0..h {
                if self.comp[i][j] != self.comp[j][i] {
                    return false;
                }
                for k in 0..h {
                    if self.comp[self.comp[i][j]][k] != self.comp[i][self.comp[j][k]] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Indices of the subgroup of `l`-th powers, sorted.
    pub fn power_subgroup(&self, l: u64) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.forms.len()).map(|i| self.pow(i, l)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Characters of the group; with `Some(l)` only those with `chi^l` trivial.
    pub fn characters(&self, order_filter: Option<u64>) -> Result<Vec<ClassCharacter>> {
        if let Some(l) = order_filter {
            if l == 0 || !self.h.is_multiple_of(l) {
                return Err(Error::OrderNotDividing { l, h: self.h });
            }
        }
        let all = self.dual_group();
        Ok(match order_filter {
            None => all,
            Some(l) => all.into_iter().filter(|c| l % c.order == 0).collect(),
        })
    }

    /// Builds the dual group by extending characters one generator at a time.
    fn dual_group(&self) -> Vec<ClassCharacter> {
        let h = self.forms.len();
        let e = self.exponent();
        // subgroup membership and exponent tables, values in Z/e
        let mut in_sub = vec![false; h];
        in_sub[self.identity] = true;
        let mut members = vec![self.identity];
        let mut chars: Vec<Vec<u64>> = vec![vec![0; h]];
        for g in 0..h {
            if in_sub[g] {
                continue;
            }
            let mut k = 1u64;
            let mut gk = g;
            while !in_sub[gk] {
                gk = self.comp[gk][g];
                k += 1;
            }
            // powers g^j for j < k lie in distinct cosets
            let mut new_chars = Vec::with_capacity(chars.len() * k as usize);
            for chi in &chars {
                let target = chi[gk];
                // solve k x = target (mod e); solutions exist as k | e/ord stuff
                let step = e / k;
                let base = (0..e).find(|&x| (k * x) % e == target).expect("extendable character");
                for t in 0..k {
                    let x = (base + t * step) % e;
                    let mut ext = chi.clone();
                    let mut gj = self.identity;
                    for j in 0..k {
                        for &m in &members {
                            let idx = self.comp[m][gj];
                            ext[idx] = (chi[m] + j * x) % e;
                        }
                        gj = self.comp[gj][g];
                    }
                    new_chars.push(ext);
                }
            }
            let mut new_members = Vec::with_capacity(members.len() * k as usize);
            let mut gj = self.identity;
            for _ in 0..k {
                for &m in &members {
                    let idx = self.comp[m][gj];
                    new_members.push(idx);
                    in_sub[idx] = true;
                }
                gj = self.comp[gj][g];
            }
            members = new_members;
            chars = new_chars;
        }
        chars
            .into_iter()
            .map(|ex| {
                let g = ex.iter().fold(e as i64, |acc, &x| gcd(acc, x as i64)) as u64;
                let order = e / g;
                ClassCharacter { exponents: ex.iter().map(|&x| x / g).collect(), order }
            })
            .collect()
    }

    /// Representation numbers `r_A(n)` for every class and every `n <= bound`,
    /// laid out as `table[class][n]` (index 0 unused).
    pub fn rep_count_table(&self, bound: usize) -> Vec<Vec<u32>> {
        self.forms
            .iter()
            .map(|f| {
                let mut t = vec![0u32; bound + 1];
                f.for_each_point(bound as u64, |_, _, v| t[v as usize] += 1);
                let w = self.w_k as u32;
                for x in t.iter_mut() {
                    debug_assert!(*x % w == 0);
                    *x /= w;
                }
                t
            })
            .collect()
    }

    /// The same counts as [`ClassGroup::rep_count_table`], stored sparsely by `n`.
    pub fn sparse_reps(&self, bound: usize) -> SparseReps {
        let w = self.w_k as u32;
        let mut triples: Vec<(u32, u32, u32)> = Vec::new();
        let mut t = vec![0u32; bound + 1];
        for (class, f) in self.forms.iter().enumerate() {
            t.iter_mut().for_each(|x| *x = 0);
            f.for_each_point(bound as u64, |_, _, v| t[v as usize] += 1);
            for (n, &cnt) in t.iter().enumerate() {
                if cnt > 0 {
                    triples.push((n as u32, class as u32, cnt / w));
                }
            }
        }
        triples.sort_unstable();
        let mut offsets = vec![0u32; bound + 2];
        for &(n, _, _) in &triples {
            offsets[n as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let entries = triples.into_iter().map(|(_, a, r)| (a, r)).collect();
        SparseReps { bound, offsets, entries }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "disc": { "d0": self.disc.d0, "c": self.disc.c, "d": self.disc.d() },
            "forms": self.forms.iter().map(|f| [f.a, f.b, f.c]).collect::<Vec<_>>(),
            "comp": self.comp,
            "h": self.h,
            "w_K": self.w_k,
        })
    }
}

/// Nonzero `r_A(n)` for `n <= bound`, grouped by `n`.
#[derive(Debug, Clone)]
pub struct SparseReps {
    pub bound: usize,
    offsets: Vec<u32>,
    entries: Vec<(u32, u32)>,
}

impl SparseReps {
    /// Pairs `(class, r_class(n))` with nonzero count.
    pub fn at(&self, n: usize) -> &[(u32, u32)] {
        &self.entries[self.offsets[n] as usize..self.offsets[n + 1] as usize]
    }

    /// `sum_A chi(A) r_A(n)` for every `n <= bound`.
    pub fn twisted_counts(&self, chi: &ClassCharacter) -> Vec<Complex64> {
        let vals: Vec<Complex64> = (0..chi.exponents.len()).map(|a| chi.value(a)).collect();
        (0..=self.bound).map(|n| self.at(n).iter().map(|&(a, r)| vals[a as usize] * r as f64).sum()).collect()
    }
}

/// Build the class group of the order described by `disc`.
pub fn class_group(disc: Discriminant) -> Result<ClassGroup> {
    ClassGroup::new(disc)
}

/// A character of a [`ClassGroup`], stored as exponents of `exp(2 pi i / order)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCharacter {
    pub exponents: Vec<u64>,
    pub order: u64,
}

impl ClassCharacter {
    pub fn value(&self, class: usize) -> Complex64 {
        let k = self.exponents[class] % self.order;
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if 2 * k == self.order {
            return Complex64::new(-1.0, 0.0);
        }
        Complex64::from_polar(1.0, 2.0 * PI * k as f64 / self.order as f64)
    }

    pub fn conj(&self) -> ClassCharacter {
        ClassCharacter {
            exponents: self.exponents.iter().map(|&x| (self.order - x % self.order) % self.order).collect(),
            order: self.order,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Whether the character takes only real values.
    pub fn is_real(&self) -> bool {
        self.order <= 2
    }
}

/// `r_A(n)`: lattice points of `form` with value `n`, divided by the unit count `w`.
pub fn rep_count(form: &ReducedForm, w: u64, n: u64) -> f64 {
    form.lattice_count(n) as f64 / w as f64
}
