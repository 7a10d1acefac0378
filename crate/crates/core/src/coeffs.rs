//! Coefficient providers for GL_n series and Hecke series of class group characters.
//!
//! All coefficients are analytically normalised, so that the functional
//! equation relates `s` and `1 - s`. Classical integer coefficients only
//! appear in [`ramanujan_tau`] and [`eta_11_coefficients`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::archimedean::{GammaFactor, GammaKind};
use crate::arith::{gcd, is_prime, spf_sieve};
use crate::dirichlet::{CharSpec, DirichletCharacter};
use crate::error::{Error, Result};
use crate::quadclass::{ClassCharacter, ClassGroup, Discriminant};
use crate::special::dirichlet_l;

type C = Complex64;

/// Built-in providers and the operations that derive new ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// Ramanujan's cusp form of weight 12 and level 1.
    RamanujanDelta,
    /// The newform `eta(z)^2 eta(11z)^2` of weight 2 and level 11.
    Weight2Level11,
    /// Symmetric square lift to GL3 of a GL2 provider.
    SymSquare(Box<ProviderKind>),
    /// Twist by a primitive Dirichlet character of conductor coprime to the level.
    DirichletTwist { base: Box<ProviderKind>, xi: CharSpec },
}

impl ProviderKind {
    pub fn label(&self) -> String {
        match self {
            ProviderKind::RamanujanDelta => "ramanujan_delta".into(),
            ProviderKind::Weight2Level11 => "weight2_level11".into(),
            ProviderKind::SymSquare(b) => format!("sym_square({})", b.label()),
            ProviderKind::DirichletTwist { base, xi } => format!("dirichlet_twist({},{})", base.label(), char_label(xi)),
        }
    }
}

fn char_label(xi: &CharSpec) -> String {
    match xi {
        CharSpec::Principal(q) => format!("principal{q}"),
        CharSpec::Kronecker(d) => format!("kronecker{d}"),
        CharSpec::Prime { p, k } => format!("prime{p}^{k}"),
    }
}

/// A GL_n coefficient series with its functional-equation data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSeries {
    pub label: String,
    pub kind: ProviderKind,
    pub dim: usize,
    pub conductor: u64,
    pub omega: DirichletCharacter,
    pub gamma_shifts: Vec<GammaFactor>,
    /// Gamma factor of the twist by an odd quadratic character.
    pub gamma_shifts_eta: Vec<GammaFactor>,
    pub selfdual: bool,
    pub eps_half: Option<C>,
    /// Coefficients are available for `n <= bound`.
    pub bound: usize,
    /// `c(p^k)` for `k = 0, 1, ...` with `p^k <= bound`.
    pub prime_data: BTreeMap<u64, Vec<C>>,
    pub notes: Vec<String>,
    #[serde(skip)]
    table: Vec<C>,
}

impl CoefficientSeries {
    /// Assemble a series from prime-power data; `c(n)` is extended multiplicatively.
    #[allow(clippy::too_many_arguments)]
    pub fn from_prime_data(
        kind: ProviderKind,
        dim: usize,
        conductor: u64,
        omega: DirichletCharacter,
        gamma_shifts: Vec<GammaFactor>,
        gamma_shifts_eta: Vec<GammaFactor>,
        selfdual: bool,
        eps_half: Option<C>,
        bound: usize,
        prime_data: BTreeMap<u64, Vec<C>>,
    ) -> Self {
        let mut s = Self {
            label: kind.label(),
            kind,
            dim,
            conductor,
            omega,
            gamma_shifts,
            gamma_shifts_eta,
            selfdual,
            eps_half,
            bound,
            prime_data,
            notes: Vec::new(),
            table: Vec::new(),
        };
        s.rebuild_table();
        s
    }

    fn rebuild_table(&mut self) {
        let n = self.bound;
        let spf = spf_sieve(n.max(1));
        let mut t = vec![C::new(0.0, 0.0); n + 1];
        if n >= 1 {
            t[1] = C::new(1.0, 0.0);
        }
        for m in 2..=n {
            let p = spf[m] as usize;
            let mut rest = m;
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            let local = self.prime_data.get(&(p as u64)).and_then(|v| v.get(k)).copied().unwrap_or_default();
            t[m] = local * t[rest];
        }
        self.table = t;
    }

    pub fn coefficient(&self, n: u64) -> Result<C> {
        if n == 0 || n as usize > self.bound {
            return Err(Error::CoefficientBound { n, bound: self.bound as u64 });
        }
        Ok(self.table[n as usize])
    }

    /// Coefficients `c(0..=bound)`, with `c(0) = 0`.
    pub fn table(&self) -> &[C] {
        &self.table
    }

    /// `c(p^k)` for a prime `p <= bound`, extending past the bound through the
    /// provider's local recursion.
    pub fn prime_power(&self, p: u64, k: usize) -> Result<C> {
        let data = self.prime_data.get(&p).ok_or(Error::CoefficientBound { n: p, bound: self.bound as u64 })?;
        if let Some(v) = data.get(k) {
            return Ok(*v);
        }
        let rec = self.local_recursion(p);
        let mut h: Vec<C> = data.clone();
        while h.len() <= k {
            let j = h.len();
            let mut next = C::new(0.0, 0.0);
            for (i, e) in rec.iter().enumerate() {
                if j > i {
                    next += e * h[j - 1 - i];
                }
            }
            h.push(next);
        }
        Ok(h[k])
    }

    /// Linear recursion `h_k = sum_i r_i h_{k-1-i}` satisfied by `c(p^k)`.
    fn local_recursion(&self, p: u64) -> Vec<C> {
        let c1 = self.prime_data[&p].get(1).copied().unwrap_or_default();
        let w = self.omega.eval(p);
        match self.dim {
            1 => vec![c1],
            2 => vec![c1, -w],
            3 => {
                // Satake parameters of the symmetric square of a GL2 datum with central value w
                let e1 = c1;
                vec![e1, -w * e1, w * w * w]
            }
            _ => vec![c1],
        }
    }

    /// `c(n^2)` for `n <= bound`.
    pub fn square_coefficient(&self, n: u64, spf: &[u32]) -> Result<C> {
        let mut n = n;
        let mut acc = C::new(1.0, 0.0);
        while n > 1 {
            let p = spf[n as usize] as u64;
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            acc *= self.prime_power(p, 2 * k)?;
        }
        Ok(acc)
    }

    pub fn dual_coefficient(&self, n: u64) -> Result<C> {
        self.coefficient(n).map(|c| c.conj())
    }

    pub fn ramified(&self, p: u64) -> bool {
        self.conductor.is_multiple_of(p)
    }

    /// Unramified primes satisfy `|c(p)| <= n p^{1/2 - 1/(n^2+1)}`.
    pub fn lrs_box_ok(&self) -> bool {
        let n = self.dim as f64;
        let theta = 0.5 - 1.0 / (n * n + 1.0);
        self.prime_data.iter().filter(|(p, _)| !self.ramified(**p)).all(|(p, v)| v[1].norm() <= n * (*p as f64).powf(theta) + 1e-12)
    }

    /// Whether every gamma shift is real and non-negative, which is what the
    /// built-in holomorphic providers satisfy.
    pub fn tempered_at_infinity(&self) -> bool {
        self.gamma_shifts.iter().all(|g| g.shift.im == 0.0 && g.shift.re >= 0.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serialisable provider")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mut s: Self = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(e.to_string()))?;
        s.rebuild_table();
        Ok(s)
    }
}

/// Build a provider with coefficients up to `bound`.
pub fn make_provider(kind: &ProviderKind, bound: usize) -> Result<CoefficientSeries> {
    let bound = bound.max(2);
    match kind {
        ProviderKind::RamanujanDelta => {
            let tau = ramanujan_tau(bound);
            let cp = |p: u64| C::new(tau[p as usize] as f64 / (p as f64).powf(5.5), 0.0);
            let omega = DirichletCharacter::principal(1);
            let data = gl2_prime_data(bound, &omega, cp);
            Ok(CoefficientSeries::from_prime_data(
                kind.clone(),
                2,
                1,
                omega,
                vec![GammaFactor::c(5.5)],
                vec![GammaFactor::c(5.5)],
                true,
                Some(C::new(1.0, 0.0)),
                bound,
                data,
            ))
        }
        ProviderKind::Weight2Level11 => {
            let a = eta_11_coefficients(bound);
            let cp = |p: u64| C::new(a[p as usize] as f64 / (p as f64).sqrt(), 0.0);
            let omega = DirichletCharacter::principal(11);
            let data = gl2_prime_data(bound, &omega, cp);
            let mut s = CoefficientSeries::from_prime_data(
                kind.clone(),
                2,
                11,
                omega,
                vec![GammaFactor::c(0.5)],
                vec![GammaFactor::c(0.5)],
                true,
                Some(C::new(1.0, 0.0)),
                bound,
                data,
            );
            s.notes.push("a(11) = 1 taken from the eta-product expansion; omega(11) = 0".into());
            Ok(s)
        }
        ProviderKind::SymSquare(base) => {
            if !matches!(**base, ProviderKind::RamanujanDelta | ProviderKind::Weight2Level11) {
                return Err(Error::Invalid("symmetric square is built only from the untwisted GL2 providers".into()));
            }
            let b = make_provider(base, bound)?;
            sym_square(&b)
        }
        ProviderKind::DirichletTwist { base, xi } => {
            let b = make_provider(base, bound)?;
            let xi_char = DirichletCharacter::from_spec(xi)?;
            dirichlet_twist(&b, &xi_char, kind.clone())
        }
    }
}

fn gl2_prime_data<F: Fn(u64) -> C>(bound: usize, omega: &DirichletCharacter, cp: F) -> BTreeMap<u64, Vec<C>> {
    let mut data = BTreeMap::new();
    for p in crate::arith::primes_up_to(bound) {
        let c1 = cp(p);
        let w = omega.eval(p);
        let mut v = vec![C::new(1.0, 0.0), c1];
        let mut pk = p as u128 * p as u128;
        while pk <= bound as u128 {
            let k = v.len();
            let next = c1 * v[k - 1] - w * v[k - 2];
            v.push(next);
            pk *= p as u128;
        }
        data.insert(p, v);
    }
    data
}

/// Symmetric square of a GL2 provider.
pub fn sym_square(base: &CoefficientSeries) -> Result<CoefficientSeries> {
    if base.dim != 2 {
        return Err(Error::Invalid("symmetric square needs a GL2 provider".into()));
    }
    let bound = base.bound;
    let mut data = BTreeMap::new();
    for (&p, v) in &base.prime_data {
        let w = base.omega.eval(p);
        let c = v[1];
        let e1 = c * c - w;
        let e2 = w * e1;
        let e3 = w * w * w;
        let mut h = vec![C::new(1.0, 0.0), e1];
        let mut pk = p as u128 * p as u128;
        while pk <= bound as u128 {
            let k = h.len();
            let mut next = e1 * h[k - 1] - e2 * h[k - 2];
            if k >= 3 {
                next += e3 * h[k - 3];
            }
            h.push(next);
            pk *= p as u128;
        }
        data.insert(p, h);
    }
    let nu = base.gamma_shifts.iter().find(|g| g.kind == GammaKind::C).map(|g| g.shift.re).unwrap_or(0.5);
    let omega3 = base.omega.pow(3);
    let kind = ProviderKind::SymSquare(Box::new(base.kind.clone()));
    let mut s = CoefficientSeries::from_prime_data(
        kind,
        3,
        base.conductor * base.conductor,
        omega3,
        vec![GammaFactor::r(1.0), GammaFactor::c(2.0 * nu)],
        vec![GammaFactor::r(0.0), GammaFactor::c(2.0 * nu)],
        true,
        Some(C::new(1.0, 0.0)),
        bound,
        data,
    );
    s.notes.push("conductor f^2 valid for squarefree level".into());
    Ok(s)
}

/// Flip the parity of every `Gamma_R` factor, as twisting by an odd character does.
/// Returns the new factors and the archimedean correction to the root number.
pub fn flip_parity(shifts: &[GammaFactor]) -> (Vec<GammaFactor>, C) {
    let mut kappa = C::new(1.0, 0.0);
    let out = shifts
        .iter()
        .map(|g| match g.kind {
            GammaKind::C => *g,
            GammaKind::R => {
                let even = (g.shift.re.round() as i64).rem_euclid(2) == 0;
                if even {
                    kappa *= C::new(0.0, -1.0);
                    GammaFactor { kind: GammaKind::R, shift: g.shift + 1.0 }
                } else {
                    kappa *= C::new(0.0, 1.0);
                    GammaFactor { kind: GammaKind::R, shift: g.shift - 1.0 }
                }
            }
        })
        .collect();
    (out, kappa)
}

/// Root number of `Pi (x) xi` for primitive `xi` of conductor `r` coprime to `f(Pi)`:
/// `eps(Pi) omega(r) xi(f) (tau(xi)/sqrt r)^n kappa_inf`.
pub fn twisted_root_number(pi: &CoefficientSeries, xi: &DirichletCharacter) -> Result<C> {
    let eps = pi.eps_half.ok_or_else(|| Error::RootNumberUnavailable(pi.label.clone()))?;
    let r = xi.modulus;
    if r == 1 {
        return Ok(eps);
    }
    let g = xi.gauss_sum() / (r as f64).sqrt();
    let kappa = if xi.parity() == 1 { flip_parity(&pi.gamma_shifts).1 } else { C::new(1.0, 0.0) };
    Ok(eps * pi.omega.eval(r) * xi.eval(pi.conductor) * g.powu(pi.dim as u32) * kappa)
}

/// Twist by a primitive Dirichlet character.
pub fn dirichlet_twist(base: &CoefficientSeries, xi: &DirichletCharacter, kind: ProviderKind) -> Result<CoefficientSeries> {
    let r = xi.modulus;
    if gcd(r as i64, base.conductor as i64) != 1 {
        return Err(Error::NotCoprime(format!("twist modulus {r} and level {}", base.conductor)));
    }
    if !xi.is_primitive() {
        return Err(Error::Invalid(format!("twisting character mod {r} is not primitive")));
    }
    let eps = twisted_root_number(base, xi).ok();
    let mut data = BTreeMap::new();
    for (&p, v) in &base.prime_data {
        let x = xi.eval(p);
        let mut xk = C::new(1.0, 0.0);
        let w: Vec<C> = v
            .iter()
            .map(|c| {
                let out = c * xk;
                xk *= x;
                out
            })
            .collect();
        data.insert(p, w);
    }
    let shifts = if xi.parity() == 1 { flip_parity(&base.gamma_shifts).0 } else { base.gamma_shifts.clone() };
    let shifts_eta = flip_parity(&shifts).0;
    let omega = base.omega.mul(&xi.pow(base.dim as u32));
    let real_xi = xi.values.iter().all(|v| v.im.abs() < 1e-12);
    let conductor = base.conductor * r.pow(base.dim as u32);
    Ok(CoefficientSeries::from_prime_data(
        kind,
        base.dim,
        conductor,
        omega,
        shifts,
        shifts_eta,
        base.selfdual && real_xi,
        eps,
        base.bound,
        data,
    ))
}

/// Exact `tau(n)` for `0 <= n <= n_max` (`tau(0) = 0`) from `q prod (1 - q^n)^24`.
///
/// The 24th power is `J^8` with Jacobi's sparse `J = prod (1 - q^n)^3`; the
/// power is computed modulo four primes below `2^31` with the sparse power
/// recurrence and recombined by Garner's algorithm. Exact for `n_max <= 10^6`.
pub fn ramanujan_tau(n_max: usize) -> Vec<i128> {
    let len = n_max; // coefficients of prod(1 - q^n)^24 up to q^{n_max - 1}
    let mut jac = Vec::new();
    let mut j = 1usize;
    while j * (j + 1) / 2 < len.max(1) {
        let sign = if j.is_multiple_of(2) { 1i64 } else { -1 };
        jac.push((j * (j + 1) / 2, sign * (2 * j as i64 + 1)));
        j += 1;
    }
    let primes = large_primes(4);
    let residues: Vec<Vec<u64>> = primes.par_iter().map(|&p| sparse_power_mod(&jac, 8, len, p)).collect();
    let mut out = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        let r: Vec<u64> = residues.iter().map(|v| v[n - 1]).collect();
        out[n] = garner(&r, &primes);
    }
    out
}

fn large_primes(k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = (1u64 << 31) - 1;
    while out.len() < k {
        if is_prime(p) {
            out.push(p);
        }
        p -= 2;
    }
    out
}

/// Coefficients of `f^m` mod `p` up to `q^{len-1}` for sparse `f = 1 + sum c_k q^k`.
///
/// The weights `((m+1)k - n) c_k` are small integers, so each row is summed
/// exactly in `i128` and reduced once.
fn sparse_power_mod(f: &[(usize, i64)], m: u64, len: usize, p: u64) -> Vec<u64> {
    let mut g = vec![0u64; len.max(1)];
    g[0] = 1;
    let mut inv = vec![0u64; len.max(2)];
    if len > 1 {
        inv[1] = 1;
    }
    for i in 2..len {
        inv[i] = (p - (p / i as u64) * inv[(p % i as u64) as usize] % p) % p;
    }
    let step = (m + 1) as i64;
    for n in 1..len {
        let mut acc: i128 = 0;
        for &(k, c) in f {
            if k > n {
                break;
            }
            let w = (step * k as i64 - n as i64) * c;
            acc += w as i128 * g[n - k] as i128;
        }
        let r = acc.rem_euclid(p as i128) as u64;
        g[n] = r * inv[n] % p;
    }
    g
}

fn garner(r: &[u64], m: &[u64]) -> i128 {
    let k = r.len();
    let mut digits = vec![0u64; k];
    for i in 0..k {
        let p = m[i];
        let mut x = r[i] % p;
        for j in 0..i {
            let inv = crate::arith::mod_pow(m[j] % p, p - 2, p);
            x = (x + p - digits[j] % p) % p * inv % p;
        }
        digits[i] = x;
    }
    let mut value: u128 = 0;
    for i in (0..k).rev() {
        value = value * m[i] as u128 + digits[i] as u128;
    }
    let modulus: u128 = m.iter().map(|&x| x as u128).product();
    if value > modulus / 2 {
        -((modulus - value) as i128)
    } else {
        value as i128
    }
}

/// `a(n)` for `0 <= n <= n_max` (`a(0) = 0`) of `eta(z)^2 eta(11z)^2`.
pub fn eta_11_coefficients(n_max: usize) -> Vec<i64> {
    let len = n_max.max(1);
    // pentagonal expansion of prod(1 - q^n)
    let mut pent: Vec<(usize, i64)> = Vec::new();
    let mut k = 1i64;
    loop {
        let e1 = (k * (3 * k - 1) / 2) as usize;
        let e2 = (k * (3 * k + 1) / 2) as usize;
        if e1 >= len {
            break;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        pent.push((e1, sign));
        if e2 < len {
            pent.push((e2, sign));
        }
        k += 1;
    }
    pent.sort_unstable();
    // P^2 as a sum over pairs of pentagonal exponents
    let mut g = vec![0i64; len];
    let full = pent_full(&pent);
    for &(i, ci) in &full {
        for &(j, cj) in &full {
            if i + j >= len {
                break;
            }
            g[i + j] += ci * cj;
        }
    }
    // multiply twice by P(q^11)
    let mut h = g;
    for _ in 0..2 {
        let mut next = h.clone();
        for &(k, c) in &pent {
            let shift = 11 * k;
            if shift >= len {
                break;
            }
            for n in shift..len {
                next[n] += c * h[n - shift];
            }
        }
        h = next;
    }
    let mut out = vec![0i64; n_max + 1];
    for n in 1..=n_max {
        out[n] = h[n - 1];
    }
    out
}

fn pent_full(pent: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut v = Vec::with_capacity(pent.len() + 1);
    v.push((0, 1));
    v.extend_from_slice(pent);
    v
}

/// Coefficients `c_chi(n) = sum_A chi(A) r_A(n)` of a class group character.
///
/// For orders with `c > 1` only `n` coprime to `c` are kept, which is the
/// Dirichlet series of proper ideals prime to the conductor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeckeSeries {
    pub chi: ClassCharacter,
    pub disc: Discriminant,
    pub bound: usize,
    pub coeffs: Vec<C>,
}

impl HeckeSeries {
    pub fn new(group: &ClassGroup, chi: &ClassCharacter, bound: usize) -> Self {
        let reps = group.rep_count_table(bound);
        Self::from_reps(group, &reps, chi, bound)
    }

    /// Build from a precomputed `rep_count_table`, so many characters can share it.
    pub fn from_reps(group: &ClassGroup, reps: &[Vec<u32>], chi: &ClassCharacter, bound: usize) -> Self {
        let c = group.disc.c as i64;
        let mut coeffs = vec![C::new(0.0, 0.0); bound + 1];
        for (a, row) in reps.iter().enumerate() {
            let v = chi.value(a);
            for (n, &r) in row.iter().enumerate().take(bound + 1) {
                if r != 0 && (c == 1 || gcd(n as i64, c) == 1) {
                    coeffs[n] += v * r as f64;
                }
            }
        }
        Self { chi: chi.clone(), disc: group.disc, bound, coeffs }
    }

    pub fn coefficient(&self, n: u64) -> Result<C> {
        if n == 0 || n as usize > self.bound {
            return Err(Error::CoefficientBound { n, bound: self.bound as u64 });
        }
        Ok(self.coeffs[n as usize])
    }
}

pub fn hecke_coefficient(h: &HeckeSeries, n: u64) -> Result<C> {
    h.coefficient(n)
}

pub fn coefficient(pi: &CoefficientSeries, n: u64) -> Result<C> {
    pi.coefficient(n)
}

/// A truncated symmetric-square value with its tail estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sym2Partial {
    pub value: C,
    pub tail_bound: f64,
    pub terms: usize,
    /// True when Cesàro smoothing was used (`Re s <= 1`).
    pub smoothed: bool,
}

impl Sym2Partial {
    pub fn check(&self, tol: f64) -> Result<C> {
        if self.tail_bound > tol {
            return Err(Error::Tolerance { achieved: self.tail_bound, target: tol, what: "symmetric-square tail".into() });
        }
        Ok(self.value)
    }
}

/// `L(2s, omega) sum_{n <= N} c(n^2) n^{-s}`.
///
/// For `Re s > 1` the tail is bounded with `sum_{n <= x} d(n^2) ~ (3/pi^2) x log^2 x`.
/// For `Re s <= 1` the partial sums are Cesàro averaged and the spread of three
/// consecutive averaging windows is reported as the tail estimate.
pub fn sym2_partial_value(pi: &CoefficientSeries, s: C, n: usize) -> Result<Sym2Partial> {
    if pi.dim != 2 {
        return Err(Error::Invalid("symmetric-square partial sums need a GL2 provider".into()));
    }
    if n > pi.bound {
        return Err(Error::CoefficientBound { n: n as u64, bound: pi.bound as u64 });
    }
    let spf = spf_sieve(n.max(2));
    let l2 = dirichlet_l(2.0 * s, &pi.omega.values);
    let mut partial = Vec::with_capacity(n + 1);
    let mut acc = C::new(0.0, 0.0);
    partial.push(acc);
    for m in 1..=n {
        let c = pi.square_coefficient(m as u64, &spf)?;
        acc += c * (-s * (m as f64).ln()).exp();
        partial.push(acc);
    }
    if s.re > 1.0 {
        let sigma = s.re;
        let l = (n as f64).ln();
        let e = sigma - 1.0;
        let integral = (n as f64).powf(1.0 - sigma) * (l * l / e + 2.0 * l / (e * e) + 2.0 / (e * e * e));
        let tail = 2.0 * 3.0 / (std::f64::consts::PI.powi(2)) * integral * l2.norm();
        return Ok(Sym2Partial { value: l2 * acc, tail_bound: tail, terms: n, smoothed: false });
    }
    // Cesàro (C,1) means over windows ending at n/2, 3n/4, n
    let mean = |end: usize| -> C {
        let start = end / 2;
        let cnt = (end - start) as f64;
        partial[start + 1..=end].iter().sum::<C>() / cnt
    };
    let ends = [n / 2, 3 * n / 4, n];
    let vals: Vec<C> = ends.iter().map(|&e| mean(e.max(2))).collect();
    let spread = vals.iter().flat_map(|a| vals.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    Ok(Sym2Partial { value: l2 * vals[2], tail_bound: spread * l2.norm(), terms: n, smoothed: true })
}
