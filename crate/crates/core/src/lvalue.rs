//! L-values of `Pi x pi(chi)` by smoothed approximate functional equations.
//!
//! [`SmoothedSum`] is the generic evaluator: given a gamma factor, the square
//! root `Y` of the conductor and an evaluation point, it fixes the cutoff
//! tables and the number of Dirichlet terms. Any pair of coefficient
//! sequences `(b, b_dual)` can then be summed against it, which is how one
//! table serves every class group character of a cell. The same evaluator
//! computes standard GL_n values (symmetric squares, the GL_2 factors of a
//! basechange) used as independent checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archimedean::{basechange_gamma, GammaProduct};
use crate::arith::gcd;
use crate::coeffs::{twisted_root_number, CoefficientSeries};
use crate::cutoff::{central_kernel, strip_kernel, CutoffSpec, Kernel, Variant};
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::quadclass::{ClassCharacter, ClassGroup, Discriminant, SparseReps};

type C = Complex64;

/// The two sides of a smoothed sum before the root number is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedParts {
    pub first: C,
    pub second: C,
    pub err_quadrature: f64,
}

impl SmoothedParts {
    pub fn combine(&self, eps: C) -> C {
        self.first + eps * self.second
    }
}

/// Precomputed weights `N^{-s} V_1(N/Y)` and `pref N^{-(1-s)} V_2(N/Y)`.
#[derive(Debug, Clone)]
pub struct SmoothedSum {
    pub big_y: f64,
    pub n_max: usize,
    pub err_truncation: f64,
    pub prefactor: C,
    pub spec: CutoffSpec,
    w1: Vec<C>,
    e1: Vec<f64>,
    w2: Vec<C>,
    e2: Vec<f64>,
}

fn envelope(n: f64, degree: usize, sigma: f64) -> f64 {
    (n.ln() + 1.0).powi(degree.saturating_sub(1) as i32) * n.powf(-sigma)
}

/// Estimated `sum_{n >= start} env(n) |V(n / Y)|` by geometric blocks.
fn tail_from(kernel: &Kernel, big_y: f64, start: f64, degree: usize, sigma: f64) -> f64 {
    let mut a = start.max(1.0);
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    while a < 1e18 {
        let b = (a * 1.05).max(a + 1.0);
        let va = kernel.eval(a / big_y);
        let vb = kernel.eval(b / big_y);
        let v = (va.value.norm() + va.err).max(vb.value.norm() + vb.err);
        let env = envelope(a, degree, sigma).max(envelope(b, degree, sigma));
        let piece = v * env * (b - a);
        total += piece;
        if piece < 1e-40 && piece <= last {
            break;
        }
        last = piece;
        a = b;
    }
    total
}

impl SmoothedSum {
    /// Symmetric smoothed sum for `L(s0)` of a function with gamma factor `gamma`
    /// and conductor `big_y^2`.
    pub fn central(gamma: &GammaProduct, big_y: f64, s0: C, spec: &CutoffSpec) -> Result<Self> {
        let k1 = central_kernel(spec, gamma, s0, 1)?;
        let k2 = central_kernel(spec, gamma, s0, 2)?;
        let ratio = (gamma.dual().ln_eval(1.0 - s0)? - gamma.ln_eval(s0)?).exp();
        let pref = ratio * (big_y.ln() * (1.0 - 2.0 * s0)).exp();
        Self::build(&k1, &k2, big_y, s0, pref, spec, gamma.degree())
    }

    /// Asymmetric smoothed sum at `delta`; `omega` enters the strip test function.
    pub fn strip(gamma: &GammaProduct, omega: &DirichletCharacter, big_y: f64, delta: C, spec: &CutoffSpec) -> Result<Self> {
        let k1 = strip_kernel(spec, gamma, omega, delta, 1)?;
        let k2 = strip_kernel(spec, gamma, omega, delta, 2)?;
        let pref = (big_y.ln() * (1.0 - 2.0 * delta)).exp();
        Self::build(&k1, &k2, big_y, delta, pref, spec, gamma.degree())
    }

    fn build(k1: &Kernel, k2: &Kernel, big_y: f64, s: C, pref: C, spec: &CutoffSpec, degree: usize) -> Result<Self> {
        if !(big_y >= 1.0) {
            return Err(Error::Invalid(format!("conductor root must be >= 1, got {big_y}")));
        }
        let s1 = s.re;
        let s2 = 1.0 - s.re;
        let tail = |n: f64| tail_from(k1, big_y, n, degree, s1) + pref.norm() * tail_from(k2, big_y, n, degree, s2);
        let y_start = k1.decay_point(spec.target_tol * 1e-3).max(k2.decay_point(spec.target_tol * 1e-3 / pref.norm().max(1e-300)));
        let mut n_max = (y_start * big_y).ceil().max(1.0);
        let mut err_t = tail(n_max + 1.0);
        while err_t > spec.target_tol && n_max < spec.max_terms as f64 {
            n_max = (n_max * 1.25).ceil();
            err_t = tail(n_max + 1.0);
        }
        let n_max = (n_max as usize).min(spec.max_terms);
        let err_t = tail(n_max as f64 + 1.0);
        let t1 = k1.table(big_y, n_max);
        let t2 = k2.table(big_y, n_max);
        let mut w1 = vec![C::new(0.0, 0.0); n_max + 1];
        let mut w2 = vec![C::new(0.0, 0.0); n_max + 1];
        let mut e1 = vec![0.0; n_max + 1];
        let mut e2 = vec![0.0; n_max + 1];
        w1.par_iter_mut()
            .zip(w2.par_iter_mut())
            .zip(e1.par_iter_mut().zip(e2.par_iter_mut()))
            .enumerate()
            .skip(1)
            .for_each(|(n, ((a1, a2), (b1, b2)))| {
                let ln = (n as f64).ln();
                let p1 = (-s * ln).exp();
                let p2 = (-(1.0 - s) * ln).exp();
                *a1 = p1 * t1[n].value;
                *b1 = p1.norm() * t1[n].err;
                *a2 = p2 * t2[n].value;
                *b2 = p2.norm() * t2[n].err;
            });
        Ok(Self { big_y, n_max, err_truncation: err_t, prefactor: pref, spec: *spec, w1, e1, w2, e2 })
    }

    /// Sum coefficient sequences (indexed from 1) against the tables.
    pub fn parts(&self, b: &[C], b_dual: &[C]) -> Result<SmoothedParts> {
        if b.len() <= self.n_max || b_dual.len() <= self.n_max {
            return Err(Error::CoefficientBound { n: self.n_max as u64, bound: b.len().min(b_dual.len()).saturating_sub(1) as u64 });
        }
        let mut first = C::new(0.0, 0.0);
        let mut second = C::new(0.0, 0.0);
        let mut err = 0.0;
        let mut abs = 0.0;
        for n in 1..=self.n_max {
            let t1 = b[n] * self.w1[n];
            let t2 = b_dual[n] * self.w2[n];
            first += t1;
            second += t2;
            err += b[n].norm() * self.e1[n] + self.prefactor.norm() * b_dual[n].norm() * self.e2[n];
            abs += t1.norm() + self.prefactor.norm() * t2.norm();
        }
        let roundoff = f64::EPSILON * abs * (self.n_max as f64).sqrt();
        Ok(SmoothedParts { first, second: self.prefactor * second, err_quadrature: err + roundoff })
    }
}

/// A computed L-value with its error budget and context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub provider: String,
    pub d0: i64,
    pub c: u64,
    pub chi_index: usize,
    pub delta: C,
    pub value: C,
    pub err_quadrature: f64,
    pub err_truncation: f64,
    pub root_number: C,
    /// True when the root number was extracted numerically.
    pub root_number_numeric: bool,
    pub big_y: f64,
    pub terms: usize,
}

impl LValue {
    pub fn err(&self) -> f64 {
        self.err_quadrature + self.err_truncation
    }

    pub const CSV_HEADER: &'static str = "provider,d0,c,chi_index,delta_re,delta_im,value_re,value_im,err_q,err_t,W_re,W_im,Y";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.6e},{:.6e},{:.17e},{:.17e},{:.17e}",
            self.provider,
            self.d0,
            self.c,
            self.chi_index,
            self.delta.re,
            self.delta.im,
            self.value.re,
            self.value.im,
            self.err_quadrature,
            self.err_truncation,
            self.root_number.re,
            self.root_number.im,
            self.big_y
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "provider": self.provider,
            "d0": self.d0,
            "c": self.c,
            "chi_index": self.chi_index,
            "delta_re": self.delta.re,
            "delta_im": self.delta.im,
            "value_re": self.value.re,
            "value_im": self.value.im,
            "err_q": self.err_quadrature,
            "err_t": self.err_truncation,
            "W_re": self.root_number.re,
            "W_im": self.root_number.im,
            "Y": self.big_y,
        })
    }
}

fn check_coprime(pi: &CoefficientSeries, disc: &Discriminant) -> Result<()> {
    let dc = disc.abs_d0() as i64 * disc.c as i64;
    if gcd(pi.conductor as i64, dc) != 1 {
        return Err(Error::NotCoprime(format!("level {} and D_K c = {}", pi.conductor, dc)));
    }
    Ok(())
}

/// Square root of the conductor of `Pi_K (x) chi`: `(D^n f^2 c^{2n})^{1/2}`.
pub fn conductor_y(pi: &CoefficientSeries, disc: &Discriminant) -> Result<f64> {
    check_coprime(pi, disc)?;
    let n = pi.dim as f64;
    Ok((disc.abs_d0() as f64).powf(n / 2.0) * pi.conductor as f64 * (disc.c as f64).powf(n))
}

/// `W = eps(Pi) eps(Pi (x) eta) omega(c^2)`, the same for every ring class character.
pub fn root_number(pi: &CoefficientSeries, disc: &Discriminant) -> Result<C> {
    check_coprime(pi, disc)?;
    let eps = pi.eps_half.ok_or_else(|| Error::RootNumberUnavailable(pi.label.clone()))?;
    let eta = DirichletCharacter::kronecker(disc.d0);
    let eps_eta = twisted_root_number(pi, &eta)?;
    Ok(eps * eps_eta * pi.omega.eval(disc.c * disc.c))
}

/// Weight `psi(m) = eta(m) omega(m)` of the `m`-sum, with `m` coprime to `c`.
pub fn m_weights(pi: &CoefficientSeries, disc: &Discriminant, m_max: usize) -> Vec<C> {
    (0..=m_max)
        .map(|m| {
            if m == 0 || gcd(m as i64, disc.c as i64) != 1 {
                C::new(0.0, 0.0)
            } else {
                pi.omega.eval(m as u64) * disc.eta(m as u64) as f64
            }
        })
        .collect()
}

/// Dirichlet coefficients `b(N) = sum_{m^2 k = N} psi(m) c(k) c_chi(k)` for `N <= n_max`.
pub fn basechange_coefficients(pi: &CoefficientSeries, disc: &Discriminant, c_chi: &[C], n_max: usize) -> Result<Vec<C>> {
    if pi.bound < n_max {
        return Err(Error::CoefficientBound { n: n_max as u64, bound: pi.bound as u64 });
    }
    if c_chi.len() <= n_max {
        return Err(Error::CoefficientBound { n: n_max as u64, bound: c_chi.len() as u64 - 1 });
    }
    let table = pi.table();
    let m_max = (n_max as f64).sqrt() as usize + 1;
    let psi = m_weights(pi, disc, m_max);
    let mut b = vec![C::new(0.0, 0.0); n_max + 1];
    let base: Vec<C> = (0..=n_max).map(|k| table[k] * c_chi[k]).collect();
    for m in 1..=m_max {
        let m2 = m * m;
        if m2 > n_max || psi[m] == C::new(0.0, 0.0) {
            continue;
        }
        for k in 1..=n_max / m2 {
            b[m2 * k] += psi[m] * base[k];
        }
    }
    Ok(b)
}

/// Evaluation point used for numeric root-number extraction.
pub const ROOT_NUMBER_PROBE: C = C::new(0.6, 0.35);

/// Everything needed to evaluate `L(., Pi x pi(chi))` for the characters of one class group.
pub struct TwistContext<'a> {
    pub pi: &'a CoefficientSeries,
    pub group: &'a ClassGroup,
    pub big_y: f64,
    pub root_number: Option<C>,
    reps: Option<SparseReps>,
}

impl<'a> TwistContext<'a> {
    pub fn new(pi: &'a CoefficientSeries, group: &'a ClassGroup) -> Result<Self> {
        let big_y = conductor_y(pi, &group.disc)?;
        let root_number = match root_number(pi, &group.disc) {
            Ok(w) => Some(w),
            Err(Error::RootNumberUnavailable(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { pi, group, big_y, root_number, reps: None })
    }

    pub fn disc(&self) -> Discriminant {
        self.group.disc
    }

    /// Make sure representation counts up to `n` are cached.
    pub fn prepare(&mut self, n: usize) {
        if self.reps.as_ref().is_none_or(|r| r.bound < n) {
            self.reps = Some(self.group.sparse_reps(n));
        }
    }

    /// `c_chi(n)` for `n <= bound`, with `n` restricted to be coprime to `c`.
    pub fn hecke_coefficients(&mut self, chi: &ClassCharacter, bound: usize) -> Vec<C> {
        self.prepare(bound);
        let reps = self.reps.as_ref().expect("prepared");
        let c = self.group.disc.c as i64;
        let mut v = reps.twisted_counts(chi);
        v.truncate(bound + 1);
        if c > 1 {
            for (n, x) in v.iter_mut().enumerate() {
                if gcd(n as i64, c) != 1 {
                    *x = C::new(0.0, 0.0);
                }
            }
        }
        v
    }

    /// Coefficient pair `(b, b_dual)` of `L(s, Pi x pi(chi))`.
    pub fn coefficients(&mut self, chi: &ClassCharacter, n_max: usize) -> Result<(Vec<C>, Vec<C>)> {
        let cchi = self.hecke_coefficients(chi, n_max);
        let b = basechange_coefficients(self.pi, &self.group.disc, &cchi, n_max)?;
        let bd = b.iter().map(|x| x.conj()).collect();
        Ok((b, bd))
    }

    pub fn character(&self, index: usize) -> Result<ClassCharacter> {
        let chars = self.group.characters(None)?;
        let count = chars.len();
        chars.into_iter().nth(index).ok_or(Error::CharacterIndex { index, count })
    }

    /// Smoothed sum for this cell's gamma factor and conductor.
    pub fn plan(&self, spec: &CutoffSpec) -> Result<SmoothedSum> {
        let gamma = basechange_gamma(self.pi);
        match spec.variant {
            Variant::Central => SmoothedSum::central(&gamma, self.big_y, C::new(0.5, 0.0), spec),
            Variant::Strip { delta_re, delta_im } => {
                let delta = C::new(delta_re, delta_im);
                if !(delta.re > 0.0) {
                    return Err(Error::Invalid(format!("strip evaluation needs Re(delta) > 0, got {delta}")));
                }
                SmoothedSum::strip(&gamma, &self.pi.omega, self.big_y, delta, spec)
            }
        }
    }

    /// The value at one character, given a plan built by [`TwistContext::plan`].
    pub fn evaluate(&mut self, plan: &SmoothedSum, chi: &ClassCharacter, chi_index: usize) -> Result<LValue> {
        let w = self.root_number.ok_or_else(|| Error::RootNumberUnavailable(self.pi.label.clone()))?;
        let (b, bd) = self.coefficients(chi, plan.n_max)?;
        let parts = plan.parts(&b, &bd)?;
        Ok(self.row(plan, chi_index, parts.combine(w), parts.err_quadrature, w, false))
    }

    fn row(&self, plan: &SmoothedSum, chi_index: usize, value: C, err_q: f64, w: C, numeric: bool) -> LValue {
        let delta = match plan.spec.variant {
            Variant::Central => C::new(0.5, 0.0),
            Variant::Strip { delta_re, delta_im } => C::new(delta_re, delta_im),
        };
        LValue {
            provider: self.pi.label.clone(),
            d0: self.group.disc.d0,
            c: self.group.disc.c,
            chi_index,
            delta,
            value,
            err_quadrature: err_q,
            err_truncation: plan.err_truncation * (1.0 + w.norm()),
            root_number: w,
            root_number_numeric: numeric,
            big_y: self.big_y,
            terms: plan.n_max,
        }
    }

    /// Root number from two smoothings of different widths at an off-centre point:
    /// `A_1 + W B_1 = A_2 + W B_2`. At `s = 1/2` a self-dual sum has `A = B` and
    /// the relation degenerates, hence the shifted point.
    pub fn numeric_root_number(&mut self, spec: &CutoffSpec) -> Result<C> {
        let chi = self.character(0)?;
        let s1 = CutoffSpec { variant: Variant::Central, ..*spec };
        let s2 = CutoffSpec { width: spec.width * 2.0, ..s1 };
        let gamma = basechange_gamma(self.pi);
        let p1 = SmoothedSum::central(&gamma, self.big_y, ROOT_NUMBER_PROBE, &s1)?;
        let p2 = SmoothedSum::central(&gamma, self.big_y, ROOT_NUMBER_PROBE, &s2)?;
        let n = p1.n_max.max(p2.n_max);
        let (b, bd) = self.coefficients(&chi, n)?;
        let a = p1.parts(&b, &bd)?;
        let c = p2.parts(&b, &bd)?;
        let den = c.second - a.second;
        if den.norm() < 1e-8 {
            return Err(Error::Tolerance { achieved: den.norm(), target: 1e-8, what: "root number extraction is ill-conditioned".into() });
        }
        Ok((a.first - c.first) / den)
    }

    /// `L(1/2, Pi x pi(chi))` for the character with index `chi_index`.
    pub fn central_value(&mut self, chi_index: usize, spec: &CutoffSpec) -> Result<LValue> {
        let spec = CutoffSpec { variant: Variant::Central, ..*spec };
        let chi = self.character(chi_index)?;
        let plan = self.plan(&spec)?;
        match self.root_number {
            Some(_) => self.evaluate(&plan, &chi, chi_index),
            None => {
                let w = self.numeric_root_number(&spec)?;
                let (b, bd) = self.coefficients(&chi, plan.n_max)?;
                let parts = plan.parts(&b, &bd)?;
                Ok(self.row(&plan, chi_index, parts.combine(w), parts.err_quadrature, w, true))
            }
        }
    }

    /// `L(delta, Pi x pi(chi))` by the asymmetric smoothed sum.
    pub fn strip_value(&mut self, chi_index: usize, delta: C, spec: &CutoffSpec) -> Result<LValue> {
        let spec = CutoffSpec { variant: Variant::strip(delta), ..*spec };
        let chi = self.character(chi_index)?;
        let plan = self.plan(&spec)?;
        self.evaluate(&plan, &chi, chi_index)
    }

    /// Truncated Dirichlet series `sum_{N <= n} b(N) N^{-s}` with an average-order tail estimate.
    pub fn direct_series(&mut self, chi_index: usize, s: C, n: usize) -> Result<(C, f64)> {
        let chi = self.character(chi_index)?;
        let (b, _) = self.coefficients(&chi, n)?;
        Ok(direct_sum(&b, s, n, 2 * self.pi.dim))
    }
}

/// `sum_{N <= n} b(N) N^{-s}` and the tail estimate `int_n^inf (ln x + 1)^{d-1} x^{-Re s} dx`.
pub fn direct_sum(b: &[C], s: C, n: usize, degree: usize) -> (C, f64) {
    let v: C = (1..=n.min(b.len() - 1)).into_par_iter().map(|k| b[k] * (-s * (k as f64).ln()).exp()).sum();
    let sigma = s.re;
    let tail = if sigma > 1.0 {
        let x = n as f64;
        (x.ln() + 1.0).powi(degree as i32 - 1) * x.powf(1.0 - sigma) / (sigma - 1.0)
    } else {
        f64::INFINITY
    };
    (v, tail)
}

/// A standard (one-variable) L-value of a provider, with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardValue {
    pub value: C,
    pub err: f64,
    pub terms: usize,
}

/// `L(s, Pi)` for a provider with known root number, by the central-style smoothed sum at `s`.
pub fn standard_value(pi: &CoefficientSeries, s: C, spec: &CutoffSpec) -> Result<StandardValue> {
    let eps = pi.eps_half.ok_or_else(|| Error::RootNumberUnavailable(pi.label.clone()))?;
    let gamma = GammaProduct::new(pi.gamma_shifts.clone());
    let spec = CutoffSpec { variant: Variant::Central, ..*spec };
    let plan = SmoothedSum::central(&gamma, (pi.conductor as f64).sqrt(), s, &spec)?;
    if pi.bound < plan.n_max {
        return Err(Error::CoefficientBound { n: plan.n_max as u64, bound: pi.bound as u64 });
    }
    let b = pi.table();
    let bd: Vec<C> = b.iter().map(|x| x.conj()).collect();
    let parts = plan.parts(b, &bd)?;
    Ok(StandardValue { value: parts.combine(eps), err: parts.err_quadrature + plan.err_truncation * 2.0, terms: plan.n_max })
}

/// Number of coefficients [`standard_value`] will need.
pub fn standard_terms(pi: &CoefficientSeries, s: C, spec: &CutoffSpec) -> Result<usize> {
    let gamma = GammaProduct::new(pi.gamma_shifts.clone());
    let spec = CutoffSpec { variant: Variant::Central, ..*spec };
    Ok(SmoothedSum::central(&gamma, (pi.conductor as f64).sqrt(), s, &spec)?.n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{make_provider, ProviderKind};
    use crate::quadclass::class_group;

    #[test]
    fn conductor_examples() {
        let delta = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let e = make_provider(&ProviderKind::Weight2Level11, 10).unwrap();
        assert_eq!(conductor_y(&delta, &Discriminant::fundamental(-4).unwrap()).unwrap(), 4.0);
        assert_eq!(conductor_y(&delta, &Discriminant::fundamental(-23).unwrap()).unwrap(), 23.0);
        assert!((conductor_y(&e, &Discriminant::new(-4, 3).unwrap()).unwrap() - 396.0).abs() < 1e-9);
        assert!(matches!(conductor_y(&e, &Discriminant::fundamental(-11).unwrap()), Err(Error::NotCoprime(_))));
    }

    #[test]
    fn root_numbers() {
        let delta = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let e = make_provider(&ProviderKind::Weight2Level11, 10).unwrap();
        assert!((root_number(&delta, &Discriminant::fundamental(-4).unwrap()).unwrap() + 1.0).norm() < 1e-12);
        assert!((root_number(&e, &Discriminant::fundamental(-7).unwrap()).unwrap() + 1.0).norm() < 1e-12);
        assert!((root_number(&e, &Discriminant::fundamental(-3).unwrap()).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn riemann_zeta_by_smoothed_sum() {
        // zeta has a pole, but Dirichlet L(s, chi_{-4}) is entire with gamma Gamma_R(s + 1)
        let gamma = GammaProduct::new(vec![crate::archimedean::GammaFactor::r(1.0)]);
        let chi = DirichletCharacter::kronecker(-4);
        let b: Vec<C> = (0..2000).map(|n| if n == 0 { C::new(0.0, 0.0) } else { chi.eval(n as u64) }).collect();
        let spec = CutoffSpec::default();
        let plan = SmoothedSum::central(&gamma, 2.0, C::new(1.0, 0.0), &spec).unwrap();
        let v = plan.parts(&b, &b).unwrap().combine(C::new(1.0, 0.0));
        assert!((v - std::f64::consts::PI / 4.0).norm() < 1e-9, "{v}");
        let plan = SmoothedSum::central(&gamma, 2.0, C::new(0.5, 3.0), &spec).unwrap();
        let v = plan.parts(&b, &b).unwrap().combine(C::new(1.0, 0.0));
        let exact = crate::special::dirichlet_l(C::new(0.5, 3.0), &chi.values);
        assert!((v - exact).norm() < 1e-9);
    }

    #[test]
    fn delta_standard_value_matches_width_change() {
        let delta = make_provider(&ProviderKind::RamanujanDelta, 2000).unwrap();
        let a = standard_value(&delta, C::new(0.5, 0.0), &CutoffSpec::central(0.1)).unwrap();
        let b = standard_value(&delta, C::new(0.5, 0.0), &CutoffSpec::central(0.3)).unwrap();
        assert!((a.value - b.value).norm() < 1e-9, "{} {}", a.value, b.value);
        assert!(a.value.re > 0.0);
    }

    #[test]
    fn trivial_character_factorises() {
        let s = C::new(0.7, 0.4);
        let spec = CutoffSpec { target_tol: 1e-9, ..CutoffSpec::strip(s, 0.5) };
        let g = class_group(Discriminant::fundamental(-4).unwrap()).unwrap();
        let small = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let n = TwistContext::new(&small, &g).unwrap().plan(&spec).unwrap().n_max;
        let delta = make_provider(&ProviderKind::RamanujanDelta, n).unwrap();
        let mut ctx = TwistContext::new(&delta, &g).unwrap();
        let v = ctx.strip_value(0, s, &spec).unwrap();
        let kind = ProviderKind::DirichletTwist { base: Box::new(ProviderKind::RamanujanDelta), xi: crate::dirichlet::CharSpec::Kronecker(-4) };
        let tw = make_provider(&kind, 4000).unwrap();
        let a = standard_value(&delta, s, &CutoffSpec::default()).unwrap();
        let b = standard_value(&tw, s, &CutoffSpec::default()).unwrap();
        assert!((v.value - a.value * b.value).norm() < 1e-8 * v.value.norm(), "{} {}", v.value, a.value * b.value);
    }
}
