//! Smoothed cutoff functions `V_j(y)` as inverse Mellin transforms.
//!
//! Every cutoff has the shape `V(y) = (1/2 pi i) int_{(sigma)} G(u) y^{-u} du`
//! with `G(u) = k(u) R(u) / u`. The kernel `G` is sampled once on an
//! equispaced vertical grid; `V(y)` for many `y` then costs one rotation
//! recurrence per `y`. For `y < 1` the contour is moved left of `u = 0`
//! (picking up the residue `k(0) R(0)`) so that `y^{-u}` stays small.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::archimedean::{GammaKind, GammaProduct};
use crate::coeffs::CoefficientSeries;
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::special::dirichlet_l;

type C = Complex64;

/// Which approximate functional equation the cutoff belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Variant {
    /// Symmetric form: gamma ratios live inside `V_j`.
    Central,
    /// Asymmetric form at `delta`: `V_1` carries no gamma factor and `V_2` carries `F(delta - u)`.
    Strip { delta_re: f64, delta_im: f64 },
}

impl Variant {
    pub fn strip(delta: C) -> Self {
        Variant::Strip { delta_re: delta.re, delta_im: delta.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoffSpec {
    pub variant: Variant,
    /// Gaussian width: `k_0(s) = exp(w s^2)`.
    pub width: f64,
    pub sigma0: f64,
    /// Half-length of the integration segment; `None` picks it from the decay of the kernel.
    pub t_max: Option<f64>,
    /// Node spacing of the trapezoid rule.
    pub step: f64,
    /// Target for both the quadrature and the truncation error of a smoothed sum.
    pub target_tol: f64,
    /// Hard cap on the number of Dirichlet terms of one smoothed sum.
    pub max_terms: usize,
    /// Multiply the strip test function by `(s - (3/4 - delta))` to cancel the pole of
    /// `L(4(1 - s - delta), omega)` when `omega` is principal.
    pub vanishing_factor: bool,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            variant: Variant::Central,
            width: 0.1,
            sigma0: 2.0,
            t_max: None,
            step: 0.05,
            target_tol: 1e-10,
            max_terms: 4_000_000,
            vanishing_factor: true,
        }
    }
}

impl CutoffSpec {
    pub fn central(width: f64) -> Self {
        Self { width, ..Self::default() }
    }

    pub fn strip(delta: C, width: f64) -> Self {
        Self { variant: Variant::strip(delta), width, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !(self.step > 0.0) || !(self.target_tol > 0.0) || !(self.sigma0 > 0.0) {
            return Err(Error::Invalid("cutoff width, step, sigma0 and tolerance must be positive".into()));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::Invalid("t_max must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn k0(&self, s: C) -> C {
        (self.width * s * s).exp()
    }
}

/// A sampled Mellin kernel `G(u)` on one or two vertical lines.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub sigma0: f64,
    pub step: f64,
    /// `G(sigma0 + i k h)` for `k = -K..=K`.
    right: Vec<C>,
    /// Left line and its samples, used for `y < 1`.
    left: Option<(f64, Vec<C>)>,
    /// Residue of `G` at `u = 0`.
    pub residue: C,
    /// Bound on `|G|` past the end of the segment, times the segment length scale.
    tail: f64,
}

/// Value of a cutoff together with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffValue {
    pub value: C,
    pub err: f64,
}

impl Kernel {
    /// Sample `g` on `Re u = sigma0`, and on `Re u = sigma_left` when given.
    ///
    /// `g` may return `Ok(0)` at isolated points where it vanishes.
    pub fn sample<F>(spec: &CutoffSpec, sigma_left: Option<f64>, residue: C, g: F) -> Result<Self>
    where
        F: Fn(C) -> Result<C> + Sync,
    {
        spec.validate()?;
        let h = spec.step;
        let scan = |sigma: f64| -> Result<f64> {
            if let Some(t) = spec.t_max {
                return Ok(t);
            }
            let g0 = g(C::new(sigma, 0.0))?.norm().max(1e-300);
            let mut t = 1.0;
            let mut quiet = 0;
            while t < 400.0 {
                let a = g(C::new(sigma, t))?.norm().max(g(C::new(sigma, -t))?.norm());
                if a < 1e-22 * g0.max(1.0) {
                    quiet += 1;
                    if quiet >= 2 {
                        return Ok(t);
                    }
                } else {
                    quiet = 0;
                }
                t += 1.0;
            }
            Ok(t)
        };
        let line = |sigma: f64, t_end: f64| -> Result<(Vec<C>, f64)> {
            let k = (t_end / h).ceil() as i64;
            let vals: Vec<Result<C>> = (-k..=k).into_par_iter().map(|j| g(C::new(sigma, j as f64 * h))).collect();
            let vals: Vec<C> = vals.into_iter().collect::<Result<_>>()?;
            let edge = vals[0].norm().max(vals[vals.len() - 1].norm());
            Ok((vals, edge))
        };
        let t_right = scan(spec.sigma0)?;
        let (right, tail_r) = line(spec.sigma0, t_right)?;
        let mut tail = tail_r;
        let left = match sigma_left {
            Some(sl) => {
                let t_left = scan(sl)?;
                let (v, tl) = line(sl, t_left)?;
                tail = tail.max(tl);
                Some((sl, v))
            }
            None => None,
        };
        Ok(Self { sigma0: spec.sigma0, step: h, right, left, residue, tail })
    }

    /// `V(y)` with the trapezoid rule at step `h`; the error estimate compares against step `2h`.
    pub fn eval(&self, y: f64) -> CutoffValue {
        let ly = y.ln();
        let (sigma, nodes, add) = match &self.left {
            Some((sl, v)) if y < 1.0 => (*sl, v, self.residue),
            _ => (self.sigma0, &self.right, C::new(0.0, 0.0)),
        };
        let k = (nodes.len() / 2) as i64;
        let rot = C::from_polar(1.0, -self.step * ly);
        let mut z = C::new(1.0, 0.0);
        let mut full = nodes[k as usize];
        let mut even = nodes[k as usize];
        let mut abs = nodes[k as usize].l1_norm();
        for j in 1..=k {
            z *= rot;
            // renormalise so the recurrence stays on the unit circle
            if j % 64 == 0 {
                z /= z.norm();
            }
            let pair = nodes[(k + j) as usize] * z + nodes[(k - j) as usize] * z.conj();
            full += pair;
            abs += nodes[(k + j) as usize].l1_norm() + nodes[(k - j) as usize].l1_norm();
            if j % 2 == 0 {
                even += pair;
            }
        }
        let scale = (-sigma * ly).exp() * self.step / (2.0 * PI);
        let v_h = full * scale;
        let v_2h = even * scale * 2.0;
        let err = (v_h - v_2h).norm() + self.tail * (-sigma * ly).exp() + 4.0 * f64::EPSILON * (abs * scale + add.norm());
        CutoffValue { value: v_h + add, err }
    }

    /// `V(n / big_y)` for `n = 1..=n_max` (index 0 unused).
    pub fn table(&self, big_y: f64, n_max: usize) -> Vec<CutoffValue> {
        let mut out: Vec<CutoffValue> = (0..=n_max)
            .into_par_iter()
            .map(|n| if n == 0 { CutoffValue { value: C::new(0.0, 0.0), err: 0.0 } } else { self.eval(n as f64 / big_y) })
            .collect();
        out.shrink_to_fit();
        out
    }

    /// Smallest `y >= 1` on a geometric grid past which `|V| + err` stays below `tol`
    /// for five consecutive grid points.
    pub fn decay_point(&self, tol: f64) -> f64 {
        let mut y = 1.0;
        let mut start = None;
        let mut quiet = 0;
        while y < 1e14 {
            let v = self.eval(y);
            if v.value.norm() + v.err < tol {
                if start.is_none() {
                    start = Some(y);
                }
                quiet += 1;
                if quiet >= 5 {
                    return start.unwrap_or(y);
                }
            } else {
                start = None;
                quiet = 0;
            }
            y *= 1.1;
        }
        y
    }
}

/// Real parts of the poles of `u -> gamma(a + u)` with `Re(a + u + shift)` at the first pole.
fn first_pole_in_u(gamma: &GammaProduct, a: C) -> f64 {
    gamma.factors.iter().map(|f| -(a.re + f.shift.re)).fold(f64::NEG_INFINITY, f64::max)
}

fn left_line(rightmost_pole: f64, extra: &[f64]) -> Option<f64> {
    // place the left line halfway to the nearest pole, but no further than -1
    let mut bound: f64 = -1.0;
    for p in std::iter::once(rightmost_pole).chain(extra.iter().copied()) {
        if p < 0.0 {
            bound = bound.max(p / 2.0);
        }
    }
    if bound > -0.02 {
        None
    } else {
        Some(bound)
    }
}

/// Kernel of the central-style cutoff for a degree-`d` L-function at `s0`:
/// `j = 1`: `k_0(u) gamma(s0 + u) / (u gamma(s0))`;
/// `j = 2`: `k_0(u) dual gamma(1 - s0 + u) / (u dual gamma(1 - s0))`.
pub fn central_kernel(spec: &CutoffSpec, gamma: &GammaProduct, s0: C, j: u8) -> Result<Kernel> {
    let (g, a) = match j {
        1 => (gamma.clone(), s0),
        2 => (gamma.dual(), 1.0 - s0),
        _ => return Err(Error::Invalid(format!("cutoff index must be 1 or 2, got {j}"))),
    };
    let base = g.ln_eval(a)?;
    let pole = first_pole_in_u(&g, a);
    if pole >= -1e-8 {
        return Err(Error::Pole { arg: format!("{a}"), factor: "gamma factor right of the contour shift".into() });
    }
    let w = *spec;
    let gfun = move |u: C| -> Result<C> { Ok(w.k0(u) * (g.ln_eval(a + u)? - base).exp() / u) };
    Kernel::sample(spec, left_line(pole, &[]), C::new(1.0, 0.0), gfun)
}

/// The strip test function `k(s) = k_0(s) L(4(1 - s - delta), conj omega) [s - s_p] / norm` with `k(0) = 1`.
#[derive(Debug, Clone)]
pub struct StripTest {
    spec: CutoffSpec,
    delta: C,
    omega_bar: Vec<C>,
    use_factor: bool,
    s_p: C,
    norm: C,
}

impl StripTest {
    pub fn new(spec: &CutoffSpec, delta: C, omega: &DirichletCharacter) -> Result<Self> {
        let omega_bar = omega.conj().values;
        let principal = omega.is_trivial();
        let use_factor = principal && spec.vanishing_factor;
        let s_p = 0.75 - delta;
        let norm = if use_factor {
            if s_p.norm() < 1e-9 {
                let q = omega.modulus;
                let phi = (1..=q).filter(|&a| crate::arith::gcd(a as i64, q as i64) == 1).count() as f64;
                C::new(-phi / q as f64 / 4.0, 0.0)
            } else {
                dirichlet_l(4.0 * (1.0 - delta), &omega_bar) * (-s_p)
            }
        } else {
            if principal && (4.0 * (1.0 - delta) - 1.0).norm() < 1e-9 {
                return Err(Error::Pole { arg: format!("{delta}"), factor: "L(4(1 - s - delta), omega) at s = 0".into() });
            }
            dirichlet_l(4.0 * (1.0 - delta), &omega_bar)
        };
        if norm.norm() < 1e-300 {
            return Err(Error::Invalid("strip test function vanishes at s = 0".into()));
        }
        Ok(Self { spec: *spec, delta, omega_bar, use_factor, s_p, norm })
    }

    pub fn eval(&self, s: C) -> C {
        let l = dirichlet_l(4.0 * (1.0 - s - self.delta), &self.omega_bar);
        let f = if self.use_factor { s - self.s_p } else { C::new(1.0, 0.0) };
        self.spec.k0(s) * l * f / self.norm
    }

    /// Location of an uncancelled pole of `k`, if any.
    pub fn pole(&self) -> Option<C> {
        if self.use_factor || !is_principal(&self.omega_bar) {
            None
        } else {
            Some(self.s_p)
        }
    }
}

fn is_principal(values: &[C]) -> bool {
    values.iter().all(|v| v.norm() < 1e-12 || (v - 1.0).norm() < 1e-12)
}

/// Kernels of the strip cutoffs at `delta`:
/// `j = 1`: `k(u) / u`; `j = 2`: `k(-u) F(delta - u) / u` with `F(s) = dual gamma(1 - s) / gamma(s)`.
pub fn strip_kernel(spec: &CutoffSpec, gamma: &GammaProduct, omega: &DirichletCharacter, delta: C, j: u8) -> Result<Kernel> {
    let test = StripTest::new(spec, delta, omega)?;
    let dual = gamma.dual();
    match j {
        1 => {
            if let Some(p) = test.pole() {
                if p.re > -0.02 && p.re < spec.sigma0 {
                    return Err(Error::Pole { arg: format!("{p}"), factor: "strip test function inside the contour shift".into() });
                }
            }
            let extra: Vec<f64> = test.pole().map(|p| p.re).into_iter().collect();
            let g = move |u: C| -> Result<C> { Ok(test.eval(u) / u) };
            Kernel::sample(spec, left_line(-1.0, &extra), C::new(1.0, 0.0), g)
        }
        2 => {
            if let Some(p) = test.pole() {
                if -p.re > -0.02 && -p.re < spec.sigma0 {
                    return Err(Error::Pole { arg: format!("{}", -p), factor: "strip test function inside the contour shift".into() });
                }
            }
            let pole = first_pole_in_u(&dual, 1.0 - delta);
            if pole >= -1e-8 {
                return Err(Error::Pole { arg: format!("{delta}"), factor: "F(delta - u) right of the contour shift".into() });
            }
            let f0 = (dual.ln_eval(1.0 - delta)? - gamma.ln_eval(delta)?).exp();
            let extra: Vec<f64> = test.pole().map(|p| -p.re).into_iter().collect();
            let g = move |u: C| -> Result<C> {
                let num = dual.ln_eval(1.0 - delta + u)?;
                // 1/gamma is entire, so a node on a pole of gamma contributes zero
                let den = match gamma.ln_eval(delta - u) {
                    Ok(v) => v,
                    Err(Error::Pole { .. }) => return Ok(C::new(0.0, 0.0)),
                    Err(e) => return Err(e),
                };
                Ok(test.eval(-u) * (num - den).exp() / u)
            };
            Kernel::sample(spec, left_line(pole, &extra), f0, g)
        }
        _ => Err(Error::Invalid(format!("cutoff index must be 1 or 2, got {j}"))),
    }
}

/// The basechange cutoff `V_j(y)` of the pair `(Pi_K, spec)`.
pub fn v_cutoff(spec: &CutoffSpec, j: u8, pi: &CoefficientSeries, y: f64) -> Result<CutoffValue> {
    if !(y > 0.0) {
        return Err(Error::Invalid(format!("cutoff argument must be positive, got {y}")));
    }
    let gamma = crate::archimedean::basechange_gamma(pi);
    let kernel = match spec.variant {
        Variant::Central => central_kernel(spec, &gamma, C::new(0.5, 0.0), j)?,
        Variant::Strip { delta_re, delta_im } => {
            let omega = basechange_omega_char(pi);
            strip_kernel(spec, &gamma, &omega, C::new(delta_re, delta_im), j)?
        }
    };
    let v = kernel.eval(y);
    if v.err > spec.target_tol {
        return Err(Error::Tolerance { achieved: v.err, target: spec.target_tol, what: format!("V_{j}({y})") });
    }
    Ok(v)
}

/// The character `omega` that enters the strip test function.
pub fn basechange_omega_char(pi: &CoefficientSeries) -> DirichletCharacter {
    pi.omega.clone()
}

/// Leading constant of the `u = 0` residue of the `b = 0` terms:
/// `L(1, Sym^2 Pi) / L(2, omega)` for `j = 1` and its contragredient for `j = 2`.
pub fn residue_leading(j: u8, pi: &CoefficientSeries, sym2_at_one: C) -> Result<C> {
    match j {
        1 => Ok(sym2_at_one / dirichlet_l(C::new(2.0, 0.0), &pi.omega.values)),
        2 => {
            let sym2_dual = if pi.selfdual { sym2_at_one } else { sym2_at_one.conj() };
            Ok(sym2_dual / dirichlet_l(C::new(2.0, 0.0), &pi.omega.conj().values))
        }
        _ => Err(Error::Invalid(format!("cutoff index must be 1 or 2, got {j}"))),
    }
}

/// Whether every factor of a gamma product is `Gamma_C`.
pub fn all_complex(gamma: &GammaProduct) -> bool {
    gamma.factors.iter().all(|f| f.kind == GammaKind::C)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{make_provider, ProviderKind};

    #[test]
    fn central_small_y_is_one() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let v = v_cutoff(&CutoffSpec::default(), 1, &pi, 1e-6).unwrap();
        assert!((v.value - 1.0).norm() < 1e-4);
    }

    #[test]
    fn central_large_y_decays() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let v = v_cutoff(&CutoffSpec::default(), 1, &pi, 1e3).unwrap();
        assert!(v.value.norm() <= 1e-8, "{}", v.value);
    }

    #[test]
    fn segment_length_converges() {
        let pi = make_provider(&ProviderKind::Weight2Level11, 10).unwrap();
        let a = v_cutoff(&CutoffSpec { t_max: Some(30.0), ..CutoffSpec::default() }, 1, &pi, 1.0).unwrap();
        let b = v_cutoff(&CutoffSpec { t_max: Some(60.0), ..CutoffSpec::default() }, 1, &pi, 1.0).unwrap();
        assert!((a.value - b.value).norm() < 1e-9);
    }

    #[test]
    fn contour_position_is_irrelevant() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        for y in [0.3, 1.0, 2.5] {
            let a = v_cutoff(&CutoffSpec::default(), 2, &pi, y).unwrap();
            let b = v_cutoff(&CutoffSpec { sigma0: 3.0, ..CutoffSpec::default() }, 2, &pi, y).unwrap();
            assert!((a.value - b.value).norm() < 1e-9, "y={y}");
        }
    }

    #[test]
    fn left_and_right_contours_agree_near_one() {
        let pi = make_provider(&ProviderKind::Weight2Level11, 10).unwrap();
        let gamma = crate::archimedean::basechange_gamma(&pi);
        let k = central_kernel(&CutoffSpec::default(), &gamma, C::new(0.5, 0.0), 1).unwrap();
        let below = k.eval(1.0 - 1e-12).value;
        let above = k.eval(1.0).value;
        assert!((below - above).norm() < 1e-9);
    }

    #[test]
    fn strip_kernels_residues() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let spec = CutoffSpec::strip(C::new(0.5, 0.0), 1.0);
        let v1 = v_cutoff(&spec, 1, &pi, 1e-5).unwrap();
        assert!((v1.value - 1.0).norm() < 1e-3);
        let v2 = v_cutoff(&spec, 2, &pi, 1e-5).unwrap();
        // F(1/2) = 1 for self-dual Pi
        assert!((v2.value - 1.0).norm() < 1e-3);
    }

    #[test]
    fn strip_test_function_normalised() {
        let spec = CutoffSpec::strip(C::new(0.75, 0.0), 1.0);
        let om = DirichletCharacter::principal(1);
        let t = StripTest::new(&spec, C::new(0.75, 0.0), &om).unwrap();
        assert!((t.eval(C::new(1e-7, 0.0)) - 1.0).norm() < 1e-5);
        let t = StripTest::new(&spec, C::new(0.3, 0.2), &om).unwrap();
        assert!((t.eval(C::new(0.0, 0.0)) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn residue_leading_degenerate() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 10).unwrap();
        let z2 = crate::special::zeta(C::new(2.0, 0.0));
        let r = residue_leading(1, &pi, z2).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
        assert_eq!(residue_leading(2, &pi, z2).unwrap(), r);
    }
}
