//! Archimedean gamma factors.
//!
//! `Gamma_R(s) = pi^{-s/2} Gamma(s/2)` and `Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)`.
//! Products are always formed in log space and exponentiated once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::coeffs::CoefficientSeries;
use crate::error::{Error, Result};
use crate::special::ln_gamma;

type C = Complex64;

/// Distance to a pole below which evaluation is refused.
pub const POLE_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaKind {
    R,
    C,
}

/// One factor `Gamma_kind(s + shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub kind: GammaKind,
    pub shift: C,
}

impl GammaFactor {
    pub fn r(shift: f64) -> Self {
        Self { kind: GammaKind::R, shift: C::new(shift, 0.0) }
    }

    pub fn c(shift: f64) -> Self {
        Self { kind: GammaKind::C, shift: C::new(shift, 0.0) }
    }

    /// Real part of the first pole of `s -> Gamma_kind(s + shift)`.
    pub fn first_pole(&self) -> f64 {
        -self.shift.re
    }
}

fn pole_distance(z: C) -> f64 {
    if z.re > 0.5 {
        return f64::INFINITY;
    }
    let k = z.re.round().min(0.0);
    ((z.re - k).powi(2) + z.im * z.im).sqrt()
}

/// `ln Gamma_kind(s)`, refusing arguments within [`POLE_EPS`] of a pole.
pub fn ln_gamma_factor(kind: GammaKind, s: C) -> Result<C> {
    match kind {
        GammaKind::R => {
            let z = s / 2.0;
            if pole_distance(z) < POLE_EPS {
                return Err(Error::Pole { arg: format!("{s}"), factor: "Gamma_R".into() });
            }
            Ok(-s / 2.0 * PI.ln() + ln_gamma(z))
        }
        GammaKind::C => {
            if pole_distance(s) < POLE_EPS {
                return Err(Error::Pole { arg: format!("{s}"), factor: "Gamma_C".into() });
            }
            Ok(C::new(2f64.ln(), 0.0) - s * (2.0 * PI).ln() + ln_gamma(s))
        }
    }
}

pub fn gamma_factor(kind: GammaKind, s: C) -> Result<C> {
    ln_gamma_factor(kind, s).map(|l| l.exp())
}

/// A finite product of shifted `Gamma_R` / `Gamma_C` factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaProduct {
    pub factors: Vec<GammaFactor>,
}

impl GammaProduct {
    pub fn new(factors: Vec<GammaFactor>) -> Self {
        Self { factors }
    }

    pub fn ln_eval(&self, s: C) -> Result<C> {
        let mut acc = C::new(0.0, 0.0);
        for f in &self.factors {
            acc += ln_gamma_factor(f.kind, s + f.shift).map_err(|e| match e {
                Error::Pole { arg, factor } => Error::Pole { arg, factor: format!("{factor} with shift {}", f.shift) },
                other => other,
            })?;
        }
        Ok(acc)
    }

    pub fn eval(&self, s: C) -> Result<C> {
        self.ln_eval(s).map(|l| l.exp())
    }

    /// The factor of the contragredient: conjugated shifts.
    pub fn dual(&self) -> Self {
        Self { factors: self.factors.iter().map(|f| GammaFactor { kind: f.kind, shift: f.shift.conj() }).collect() }
    }

    pub fn concat(&self, other: &GammaProduct) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { factors }
    }

    /// Largest real part of a pole of `s -> self(s)`.
    pub fn rightmost_pole(&self) -> f64 {
        self.factors.iter().map(|f| f.first_pole()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Degree over Q: one for each `Gamma_R`, two for each `Gamma_C`.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| if f.kind == GammaKind::R { 1 } else { 2 }).sum()
    }
}

/// Gamma factor of the basechange `L(s, Pi_K)`: `L(s, Pi_inf) L(s, Pi_inf (x) eta_inf)`.
pub fn basechange_gamma(pi: &CoefficientSeries) -> GammaProduct {
    GammaProduct::new(pi.gamma_shifts.clone()).concat(&GammaProduct::new(pi.gamma_shifts_eta.clone()))
}

pub fn basechange_arch(pi: &CoefficientSeries, s: C) -> Result<C> {
    basechange_gamma(pi).eval(s)
}

/// `F(s) = L(1 - s, dual Pi_K,inf) / L(s, Pi_K,inf)`.
pub fn f_ratio(pi: &CoefficientSeries, delta: C) -> Result<C> {
    let g = basechange_gamma(pi);
    Ok((g.dual().ln_eval(1.0 - delta)? - g.ln_eval(delta)?).exp())
}

/// Gamma ratios inside the central cutoffs: `j = 1` gives
/// `gamma(s + 1/2) / gamma(1/2)`, `j = 2` gives `dual gamma(s + 1/2) / gamma(1/2)`.
pub fn afe_gamma_ratio(j: u8, pi: &CoefficientSeries, s: C) -> Result<C> {
    let g = basechange_gamma(pi);
    let half = C::new(0.5, 0.0);
    let num = match j {
        1 => g.ln_eval(s + half)?,
        2 => g.dual().ln_eval(s + half)?,
        _ => return Err(Error::Invalid(format!("cutoff index must be 1 or 2, got {j}"))),
    };
    Ok((num - g.ln_eval(half)?).exp())
}
