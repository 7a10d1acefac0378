//! Averages of twisted central values over ring class characters.
//!
//! Each average is computed twice: once as a weighted sum of per-character
//! values, and once by summing representation numbers of the relevant form
//! classes directly and running a single smoothed sum. Leading-term
//! predictions are assembled from symmetric square and Dirichlet L-values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::archimedean::f_ratio;
use crate::arith::gcd;
use crate::coeffs::{dirichlet_twist, make_provider, CoefficientSeries, ProviderKind};
use crate::cutoff::{CutoffSpec, Variant};
use crate::dirichlet::{CharSpec, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lvalue::{basechange_coefficients, standard_terms, standard_value, LValue, SmoothedSum, TwistContext};
use crate::quadclass::{ClassGroup, Discriminant};
use crate::special::dirichlet_l;

type C = Complex64;

const HALF: C = C::new(0.5, 0.0);

/// Main-term constants of a cell at `delta`.
///
/// `l1_delta`, `l2_delta`, `frak_l` and `frak_l_tilde` hold the displayed
/// constants including the `1/w_K` factor and the `L(4(1 - delta), conj omega)`
/// numerator. Predictions go through [`LeadingTerms::class_prediction`] and
/// [`LeadingTerms::galois_prediction`], which use the normalised forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerms {
    pub delta: C,
    pub w_k: u64,
    pub l1_delta: C,
    pub l2_delta: C,
    pub frak_l: C,
    pub frak_l_tilde: C,
    pub region_ok: bool,
    pub tempered_ok: bool,
    /// `L(2 delta, Sym^2)` and `L(2 - 2 delta, Sym^2 dual)`.
    pub sym2_first: C,
    pub sym2_second: C,
    pub sym2_one: C,
    /// `L(4 delta, omega)` and `L(4 - 4 delta, conj omega)`.
    pub omega_first: C,
    pub omega_second: C,
    pub omega_two: C,
    /// `L(2 delta, psi)` and `L(2 - 2 delta, conj psi)` for `psi = eta omega`.
    pub psi_first: C,
    pub psi_second: C,
    pub psi_one: C,
    pub f_delta: C,
    /// Relative error carried over from the symmetric square evaluations.
    pub rel_err: f64,
}

impl LeadingTerms {
    pub fn main_first(&self) -> C {
        self.sym2_first / self.omega_first
    }

    pub fn main_second(&self) -> C {
        self.f_delta * self.sym2_second / self.omega_second
    }

    pub fn main_frak(&self) -> C {
        self.psi_one * self.sym2_one / self.omega_two
    }

    pub fn main_frak_tilde(&self) -> C {
        self.psi_one.conj() * self.sym2_one.conj() / self.omega_two.conj()
    }

    /// Two-term prediction for the class average at `delta`.
    pub fn class_prediction(&self, w: C, big_y: f64) -> C {
        let y = C::new(big_y, 0.0).powc(1.0 - 2.0 * self.delta);
        self.psi_first * self.main_first() + w * y * self.psi_second * self.main_second()
    }

    /// Prediction `count (frak L + W frak L~)` for a sum over `count` classes.
    pub fn galois_prediction(&self, w: C, count: usize) -> C {
        count as f64 * (self.main_frak() + w * self.main_frak_tilde())
    }
}

/// Untwisted GL2 base and the real twisting character, if any.
fn sym2_source(pi: &CoefficientSeries) -> Result<(ProviderKind, Option<DirichletCharacter>)> {
    match &pi.kind {
        ProviderKind::RamanujanDelta | ProviderKind::Weight2Level11 => Ok((pi.kind.clone(), None)),
        ProviderKind::DirichletTwist { base, xi } if matches!(**base, ProviderKind::RamanujanDelta | ProviderKind::Weight2Level11) => {
            let x = DirichletCharacter::from_spec(xi)?;
            if x.values.iter().any(|v| v.im.abs() > 1e-12) {
                return Err(Error::Invalid("leading terms need a real twisting character".into()));
            }
            Ok(((**base).clone(), Some(x)))
        }
        _ => Err(Error::Invalid(format!("no symmetric square available for {}", pi.label))),
    }
}

/// `L(s, Sym^2 Pi)` at the requested points, with local factors at the primes
/// dividing the twisting modulus removed when `Pi` is a real twist.
fn sym2_values(pi: &CoefficientSeries, points: &[C], spec: &CutoffSpec) -> Result<(Vec<C>, f64)> {
    let (base_kind, xi) = sym2_source(pi)?;
    let kind = ProviderKind::SymSquare(Box::new(base_kind.clone()));
    let small = make_provider(&kind, 16)?;
    let mut bound = 16;
    for &s in points {
        bound = bound.max(standard_terms(&small, s, spec)?);
    }
    let sym2 = make_provider(&kind, bound)?;
    let omega = make_provider(&base_kind, 2)?.omega;
    let mut out = Vec::with_capacity(points.len());
    let mut rel = 0.0f64;
    for &s in points {
        let v = standard_value(&sym2, s, spec)?;
        let mut value = v.value;
        if let Some(x) = &xi {
            for (p, _) in crate::arith::factor(x.modulus) {
                let e1 = sym2.prime_data.get(&p).map(|h| h[1]).unwrap_or_default();
                let w = omega.eval(p);
                let t = C::new(p as f64, 0.0).powc(-s);
                value *= 1.0 - e1 * t + w * e1 * t * t - w * w * w * t * t * t;
            }
        }
        rel = rel.max(v.err / v.value.norm().max(1e-300));
        out.push(value);
    }
    Ok((out, rel))
}

/// `psi = eta omega`, restricted to integers coprime to `c`.
pub fn psi_character(pi: &CoefficientSeries, disc: &Discriminant) -> DirichletCharacter {
    let mut psi = DirichletCharacter::kronecker(disc.d0).mul(&pi.omega);
    if disc.c > 1 {
        psi = psi.mul(&DirichletCharacter::principal(disc.c));
    }
    psi
}

fn dirichlet_at(chi: &DirichletCharacter, s: C) -> Result<C> {
    if chi.is_trivial() && (s - 1.0).norm() < 1e-8 {
        return Err(Error::Pole { arg: format!("{s}"), factor: format!("L(s, principal mod {})", chi.modulus) });
    }
    Ok(dirichlet_l(s, &chi.values))
}

pub fn leading_terms(pi: &CoefficientSeries, disc: &Discriminant, delta: C, spec: &CutoffSpec) -> Result<LeadingTerms> {
    let one = C::new(1.0, 0.0);
    let first = 2.0 * delta;
    let second = 2.0 - 2.0 * delta;
    let (sym, rel_err) = sym2_values(pi, &[first, second.conj(), one], spec)?;
    let (sym2_first, sym2_second, sym2_one) = (sym[0], sym[1].conj(), sym[2]);
    let omega = &pi.omega;
    let omega_bar = omega.conj();
    let psi = psi_character(pi, disc);
    let psi_bar = psi.conj();
    let omega_first = dirichlet_at(omega, 4.0 * delta)?;
    let omega_second = dirichlet_at(&omega_bar, 4.0 - 4.0 * delta)?;
    let omega_two = dirichlet_at(omega, C::new(2.0, 0.0))?;
    let psi_first = dirichlet_at(&psi, first)?;
    let psi_second = dirichlet_at(&psi_bar, second)?;
    let psi_one = dirichlet_at(&psi, one)?;
    let f_delta = f_ratio(pi, delta)?;
    let w_k = disc.w_field();
    let inv_w = 1.0 / w_k as f64;
    Ok(LeadingTerms {
        delta,
        w_k,
        l1_delta: inv_w * omega_second / omega_first * sym2_first,
        l2_delta: inv_w * f_delta * sym2_second,
        frak_l: inv_w * psi_one * sym2_one / omega_two,
        frak_l_tilde: inv_w * psi_one.conj() * sym2_one.conj() / omega_two.conj(),
        region_ok: region_ok(delta.re, pi.dim),
        tempered_ok: pi.tempered_at_infinity() && pi.lrs_box_ok(),
        sym2_first,
        sym2_second,
        sym2_one,
        omega_first,
        omega_second,
        omega_two,
        psi_first,
        psi_second,
        psi_one,
        f_delta,
        rel_err,
    })
}

/// `Re(delta) >= 1/2 - 1/(n^2 + 1)`.
pub fn region_ok(delta_re: f64, n: usize) -> bool {
    let n = n as f64;
    delta_re >= 0.5 - 1.0 / (n * n + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageKind {
    ClassAverage,
    GaloisAverage,
    Basechange,
}

fn one() -> u64 {
    1
}

fn half() -> f64 {
    0.5
}

/// One unit of work: an average of a given kind over one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub kind: AverageKind,
    pub provider: ProviderKind,
    pub d0: i64,
    #[serde(default = "one")]
    pub c: u64,
    #[serde(default)]
    pub l: Option<u64>,
    #[serde(default = "half")]
    pub delta_re: f64,
    #[serde(default)]
    pub delta_im: f64,
    #[serde(default)]
    pub xi: Option<CharSpec>,
    #[serde(default)]
    pub cutoff: CutoffSpec,
}

impl Cell {
    pub fn delta(&self) -> C {
        C::new(self.delta_re, self.delta_im)
    }

    /// Canonical identity used by the sweep journal.
    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("cell serialises")
    }

    pub fn disc(&self) -> Result<Discriminant> {
        Discriminant::new(self.d0, self.c)
    }
}

/// A per-character value and its weight in the average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterValue {
    pub chi_index: usize,
    pub weight: f64,
    pub value: LValue,
}

/// JSON has no NaN: it is written as `null` and read back from `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        x.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub mod complex {
        use super::*;
        use num_complex::Complex64;

        pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
            z.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
            let [re, im] = <[Option<f64>; 2]>::deserialize(d)?;
            Ok(Complex64::new(re.unwrap_or(f64::NAN), im.unwrap_or(f64::NAN)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageReport {
    pub kind: AverageKind,
    pub cell: Cell,
    pub h: u64,
    pub w_k: u64,
    pub root_number: C,
    pub big_y: f64,
    pub terms: usize,
    pub computed: C,
    pub computed_err: f64,
    /// The same quantity by the independent route (class sums or factorisation).
    pub alternate: Option<C>,
    pub alternate_err: Option<f64>,
    #[serde(with = "nan_as_null::complex")]
    pub predicted: C,
    #[serde(with = "nan_as_null")]
    pub abs_error: f64,
    #[serde(with = "nan_as_null")]
    pub rel_error: f64,
    pub per_character: Vec<CharacterValue>,
}

impl AverageReport {
    pub const CSV_HEADER: &'static str =
        "kind,provider,d0,c,l,delta_re,delta_im,h,W_re,Y,terms,computed_re,computed_im,computed_err,alternate_re,alternate_im,alternate_err,predicted_re,predicted_im,abs_error,rel_error";

    /// `sum weight * value` over the attached characters.
    pub fn bookkeeping_sum(&self) -> C {
        self.per_character.iter().map(|v| v.weight * v.value.value).sum()
    }

    /// Whether the two routes agree within `factor` times their combined error.
    pub fn routes_agree(&self, factor: f64) -> Option<bool> {
        let alt = self.alternate?;
        let err = self.computed_err + self.alternate_err.unwrap_or(0.0);
        Some((self.computed - alt).norm() <= factor * err)
    }

    pub fn csv_row(&self) -> String {
        let kind = serde_json::to_value(self.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let alt = self.alternate.unwrap_or(C::new(f64::NAN, f64::NAN));
        format!(
            "{},{},{},{},{},{:.6},{:.6},{},{:.1},{:.6e},{},{:.15e},{:.15e},{:.3e},{:.15e},{:.15e},{:.3e},{:.15e},{:.15e},{:.3e},{:.3e}",
            kind,
            self.cell.provider.label(),
            self.cell.d0,
            self.cell.c,
            self.cell.l.map(|l| l.to_string()).unwrap_or_default(),
            self.cell.delta_re,
            self.cell.delta_im,
            self.h,
            self.root_number.re,
            self.big_y,
            self.terms,
            self.computed.re,
            self.computed.im,
            self.computed_err,
            alt.re,
            alt.im,
            self.alternate_err.unwrap_or(f64::NAN),
            self.predicted.re,
            self.predicted.im,
            self.abs_error,
            self.rel_error,
        )
    }

    fn finish(mut self) -> Self {
        self.abs_error = (self.computed - self.predicted).norm();
        // a vanishing main term (W = -1 self-dual cells) has no meaningful relative error
        self.rel_error = if self.predicted.norm() > 1e-12 { self.abs_error / self.predicted.norm() } else { f64::NAN };
        self
    }
}

/// `sum_{A in classes} r_A(n)` for `n <= n_max`, counted from lattice points of
/// the forms themselves; `n` not coprime to `c` is dropped.
pub fn class_sum_counts(group: &ClassGroup, classes: &[usize], n_max: usize) -> Vec<C> {
    let mut counts = vec![0u64; n_max + 1];
    for &a in classes {
        group.forms[a].for_each_point(n_max as u64, |_, _, v| counts[v as usize] += 1);
    }
    let c = group.disc.c as i64;
    counts
        .iter()
        .enumerate()
        .map(|(n, &k)| if c > 1 && gcd(n as i64, c) != 1 { C::new(0.0, 0.0) } else { C::new((k / group.w_k) as f64, 0.0) })
        .collect()
}

/// Smoothed sum whose coefficients come from [`class_sum_counts`], and its error.
pub fn class_sum_value(pi: &CoefficientSeries, group: &ClassGroup, plan: &SmoothedSum, w: C, classes: &[usize]) -> Result<(C, f64)> {
    let counts = class_sum_counts(group, classes, plan.n_max);
    let b = basechange_coefficients(pi, &group.disc, &counts, plan.n_max)?;
    let bd: Vec<C> = b.iter().map(|x| x.conj()).collect();
    let parts = plan.parts(&b, &bd)?;
    let err = parts.err_quadrature + plan.err_truncation * (1.0 + w.norm()) * classes.len() as f64;
    Ok((parts.combine(w), err))
}

fn variant_for(delta: C) -> Variant {
    if (delta - HALF).norm() == 0.0 {
        Variant::Central
    } else {
        Variant::strip(delta)
    }
}

fn cell_spec(spec: &CutoffSpec, delta: C) -> CutoffSpec {
    CutoffSpec { variant: variant_for(delta), ..*spec }
}

/// Number of provider coefficients a cell needs.
pub fn required_terms(cell: &Cell) -> Result<usize> {
    let disc = cell.disc()?;
    let group = ClassGroup::new(disc)?;
    let small = make_provider(&cell.provider, 16)?;
    let spec = cell_spec(&cell.cutoff, if cell.kind == AverageKind::ClassAverage { cell.delta() } else { HALF });
    match cell.kind {
        AverageKind::Basechange => {
            let xi = DirichletCharacter::from_spec(cell.xi.as_ref().unwrap_or(&CharSpec::Principal(1)))?;
            let tw = twist_or_clone(&small, &xi, cell.xi.as_ref())?;
            let ctx = TwistContext::new(&tw, &group)?;
            let mut n = ctx.plan(&spec)?.n_max;
            if disc.c == 1 {
                let eta_xi = DirichletCharacter::kronecker(disc.d0).mul(&xi);
                let t2 = dirichlet_twist(&small, &eta_xi, small.kind.clone())?;
                n = n.max(standard_terms(&tw, HALF, &spec)?).max(standard_terms(&t2, HALF, &spec)?);
            }
            Ok(n)
        }
        _ => Ok(TwistContext::new(&small, &group)?.plan(&spec)?.n_max),
    }
}

fn check_bound(pi: &CoefficientSeries, plan: &SmoothedSum) -> Result<()> {
    if pi.bound < plan.n_max {
        return Err(Error::CoefficientBound { n: plan.n_max as u64, bound: pi.bound as u64 });
    }
    Ok(())
}

/// Per-character values for the given character indices, each with `weight`.
fn character_values(ctx: &mut TwistContext, plan: &SmoothedSum, indices: &[usize], weight: f64) -> Result<Vec<CharacterValue>> {
    let chars = ctx.group.characters(None)?;
    ctx.prepare(plan.n_max);
    indices
        .iter()
        .map(|&i| {
            ctx.evaluate(plan, &chars[i], i)
                .map(|value| CharacterValue { chi_index: i, weight, value })
                .map_err(|e| Error::AtCharacter { index: i, source: Box::new(e) })
        })
        .collect()
}

fn weighted_err(values: &[CharacterValue]) -> f64 {
    values.iter().map(|v| v.weight.abs() * v.value.err()).sum()
}

/// `X = (1/h) sum_chi L(delta, Pi x pi(chi))` over the class group (`c = 1`).
///
/// The alternate route uses that the mean of `c_chi(n)` over all characters is
/// the representation number of the principal form.
pub fn class_average(pi: &CoefficientSeries, group: &ClassGroup, delta: C, spec: &CutoffSpec) -> Result<AverageReport> {
    if group.disc.c != 1 {
        return Err(Error::Invalid("class averages are defined for the maximal order (c = 1)".into()));
    }
    let spec = cell_spec(spec, delta);
    let mut ctx = TwistContext::new(pi, group)?;
    let w = ctx.root_number.ok_or_else(|| Error::RootNumberUnavailable(pi.label.clone()))?;
    let plan = ctx.plan(&spec)?;
    check_bound(pi, &plan)?;
    let h = group.h as usize;
    let indices: Vec<usize> = (0..h).collect();
    let per_character = character_values(&mut ctx, &plan, &indices, 1.0 / h as f64)?;
    let computed = per_character.iter().map(|v| v.weight * v.value.value).sum();
    let (alt, alt_err) = class_sum_value(pi, group, &plan, w, &[group.identity])?;
    let lt = leading_terms(pi, &group.disc, delta, &spec)?;
    let report = AverageReport {
        kind: AverageKind::ClassAverage,
        cell: Cell { kind: AverageKind::ClassAverage, provider: pi.kind.clone(), d0: group.disc.d0, c: 1, l: None, delta_re: delta.re, delta_im: delta.im, xi: None, cutoff: spec },
        h: group.h,
        w_k: group.w_k,
        root_number: w,
        big_y: ctx.big_y,
        terms: plan.n_max,
        computed,
        computed_err: weighted_err(&per_character),
        alternate: Some(alt),
        alternate_err: Some(alt_err),
        predicted: lt.class_prediction(w, ctx.big_y),
        abs_error: 0.0,
        rel_error: 0.0,
        per_character,
    };
    Ok(report.finish())
}

/// `G = (1/[C : C^l]) sum_{chi^l = 1} L(1/2, Pi x pi(chi))`.
///
/// The alternate route sums representation numbers over the classes of `C^l`.
pub fn galois_average(pi: &CoefficientSeries, group: &ClassGroup, l: u64, spec: &CutoffSpec) -> Result<AverageReport> {
    let spec = cell_spec(spec, HALF);
    let all = group.characters(None)?;
    group.characters(Some(l))?;
    let indices: Vec<usize> = all.iter().enumerate().filter(|(_, c)| l.is_multiple_of(c.order)).map(|(i, _)| i).collect();
    let mut ctx = TwistContext::new(pi, group)?;
    let w = ctx.root_number.ok_or_else(|| Error::RootNumberUnavailable(pi.label.clone()))?;
    let plan = ctx.plan(&spec)?;
    check_bound(pi, &plan)?;
    let per_character = character_values(&mut ctx, &plan, &indices, 1.0 / indices.len() as f64)?;
    let computed = per_character.iter().map(|v| v.weight * v.value.value).sum();
    let subgroup = group.power_subgroup(l);
    let (alt, alt_err) = class_sum_value(pi, group, &plan, w, &subgroup)?;
    let predicted = match leading_terms(pi, &group.disc, HALF, &spec) {
        Ok(lt) => lt.galois_prediction(w, subgroup.len()),
        Err(Error::Invalid(_)) => C::new(f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let d = group.disc;
    let report = AverageReport {
        kind: AverageKind::GaloisAverage,
        cell: Cell { kind: AverageKind::GaloisAverage, provider: pi.kind.clone(), d0: d.d0, c: d.c, l: Some(l), delta_re: 0.5, delta_im: 0.0, xi: None, cutoff: spec },
        h: group.h,
        w_k: group.w_k,
        root_number: w,
        big_y: ctx.big_y,
        terms: plan.n_max,
        computed,
        computed_err: weighted_err(&per_character),
        alternate: Some(alt),
        alternate_err: Some(alt_err),
        predicted,
        abs_error: 0.0,
        rel_error: 0.0,
        per_character,
    };
    Ok(report.finish())
}

fn twist_or_clone(pi: &CoefficientSeries, xi: &DirichletCharacter, spec: Option<&CharSpec>) -> Result<CoefficientSeries> {
    match spec {
        Some(s) if xi.modulus > 1 => dirichlet_twist(pi, xi, ProviderKind::DirichletTwist { base: Box::new(pi.kind.clone()), xi: s.clone() }),
        _ => Ok(pi.clone()),
    }
}

/// `L(1/2, Pi_K (x) (xi o N))` from the trivial character of the twisted provider.
///
/// For `c = 1` the alternate route is the product `L(1/2, Pi (x) xi) L(1/2, Pi (x) eta xi)`
/// of two standard values.
pub fn basechange_value(pi: &CoefficientSeries, xi: &CharSpec, group: &ClassGroup, spec: &CutoffSpec) -> Result<AverageReport> {
    let spec = cell_spec(spec, HALF);
    let xi_char = DirichletCharacter::from_spec(xi)?;
    let disc = group.disc;
    let dk = disc.abs_d0() * disc.c;
    if gcd(xi_char.modulus as i64, (pi.conductor * dk) as i64) != 1 {
        return Err(Error::NotCoprime(format!("twist modulus {} and f D_K c = {}", xi_char.modulus, pi.conductor * dk)));
    }
    let tw = twist_or_clone(pi, &xi_char, Some(xi))?;
    let mut ctx = TwistContext::new(&tw, group)?;
    let w = ctx.root_number.ok_or_else(|| Error::RootNumberUnavailable(tw.label.clone()))?;
    let plan = ctx.plan(&spec)?;
    check_bound(&tw, &plan)?;
    let trivial = group.characters(None)?.iter().position(|c| c.is_trivial()).expect("trivial character present");
    let per_character = character_values(&mut ctx, &plan, &[trivial], 1.0)?;
    let computed = per_character[0].value.value;
    let (alternate, alternate_err) = if disc.c == 1 {
        let a = standard_value(&tw, HALF, &spec)?;
        let eta_xi = DirichletCharacter::kronecker(disc.d0).mul(&xi_char);
        let t2 = dirichlet_twist(pi, &eta_xi, ProviderKind::DirichletTwist { base: Box::new(tw.kind.clone()), xi: CharSpec::Kronecker(disc.d0) })?;
        let b = standard_value(&t2, HALF, &spec)?;
        (Some(a.value * b.value), Some(a.err * b.value.norm() + b.err * a.value.norm() + a.err * b.err))
    } else {
        (None, None)
    };
    let predicted = match leading_terms(&tw, &disc, HALF, &spec) {
        Ok(lt) => lt.galois_prediction(w, group.h as usize),
        Err(Error::Invalid(_)) => C::new(f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let report = AverageReport {
        kind: AverageKind::Basechange,
        cell: Cell { kind: AverageKind::Basechange, provider: pi.kind.clone(), d0: disc.d0, c: disc.c, l: None, delta_re: 0.5, delta_im: 0.0, xi: Some(xi.clone()), cutoff: spec },
        h: group.h,
        w_k: group.w_k,
        root_number: w,
        big_y: ctx.big_y,
        terms: plan.n_max,
        computed,
        computed_err: weighted_err(&per_character),
        alternate,
        alternate_err,
        predicted,
        abs_error: 0.0,
        rel_error: 0.0,
        per_character,
    };
    Ok(report.finish())
}

/// Smooth bump supported on `(lo, hi)` with peak value 1 at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SmoothWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo < 0.0 {
            return Err(Error::Invalid(format!("window needs 0 <= lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// `sum_a c(a^2 + alpha) (a^2 + alpha)^{-1/2} W((a^2 + alpha) / y_inf)` over all integers `a`
/// with `a^2 + alpha > 0`.
pub fn shifted_convolution(pi: &CoefficientSeries, alpha: i64, y_inf: f64, window: &SmoothWindow) -> Result<C> {
    if alpha == 0 {
        return Err(Error::Invalid("shift alpha must be nonzero".into()));
    }
    let n_top = (window.hi * y_inf).floor() as i64;
    if n_top > pi.bound as i64 {
        return Err(Error::CoefficientBound { n: n_top as u64, bound: pi.bound as u64 });
    }
    let a_max = ((n_top - alpha).max(0) as f64).sqrt() as i64 + 1;
    let table = pi.table();
    let mut sum = C::new(0.0, 0.0);
    for a in -a_max..=a_max {
        let n = a * a + alpha;
        if n <= 0 || n > n_top {
            continue;
        }
        let wv = window.eval(n as f64 / y_inf);
        if wv > 0.0 {
            sum += table[n as usize] * (wv / (n as f64).sqrt());
        }
    }
    Ok(sum)
}

/// Largest coefficient index [`shifted_convolution`] reads.
pub fn shifted_terms(y_inf: f64, window: &SmoothWindow) -> usize {
    (window.hi * y_inf).floor() as usize
}

/// Evaluate one cell with a provider that has enough coefficients.
pub fn run_cell(cell: &Cell, pi: &CoefficientSeries) -> Result<AverageReport> {
    let group = ClassGroup::new(cell.disc()?)?;
    match cell.kind {
        AverageKind::ClassAverage => class_average(pi, &group, cell.delta(), &cell.cutoff),
        AverageKind::GaloisAverage => galois_average(pi, &group, cell.l.unwrap_or(1), &cell.cutoff),
        AverageKind::Basechange => basechange_value(pi, cell.xi.as_ref().unwrap_or(&CharSpec::Principal(1)), &group, &cell.cutoff),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadclass::class_group;
    use std::f64::consts::PI;

    fn e11(n: usize) -> CoefficientSeries {
        make_provider(&ProviderKind::Weight2Level11, n).unwrap()
    }

    fn group(d0: i64, c: u64) -> ClassGroup {
        class_group(Discriminant::new(d0, c).unwrap()).unwrap()
    }

    #[test]
    fn leading_terms_at_half() {
        let delta = make_provider(&ProviderKind::RamanujanDelta, 100).unwrap();
        let disc = Discriminant::fundamental(-23).unwrap();
        let spec = CutoffSpec::default();
        let lt = leading_terms(&delta, &disc, HALF, &spec).unwrap();
        assert!((lt.l1_delta - lt.l2_delta).norm() < 1e-12 * lt.l1_delta.norm());
        assert!((lt.f_delta - 1.0).norm() < 1e-12);
        // class number formula for L(1, eta)
        let expected = 2.0 * PI * 3.0 / (2.0 * 23f64.sqrt());
        assert!((lt.psi_one.re - expected).abs() < 1e-10);
        let zeta2 = PI * PI / 6.0;
        let frak = lt.sym2_one * expected / (2.0 * zeta2);
        assert!((lt.frak_l - frak).norm() < 1e-10);
        assert!(lt.region_ok && lt.tempered_ok);
    }

    #[test]
    fn region_flag() {
        assert!(!region_ok(0.1, 3));
        assert!(region_ok(0.5, 2));
        assert!(region_ok(0.3, 2));
    }

    #[test]
    fn prediction_functional_symmetry() {
        let delta = make_provider(&ProviderKind::RamanujanDelta, 100).unwrap();
        let disc = Discriminant::fundamental(-23).unwrap();
        let spec = CutoffSpec::default();
        let w = C::new(-1.0, 0.0);
        let y = 23.0;
        for d in [C::new(0.7, 0.0), C::new(0.6, 0.2)] {
            let a = leading_terms(&delta, &disc, d, &spec).unwrap();
            let b = leading_terms(&delta, &disc, 1.0 - d, &spec).unwrap();
            let lhs = a.class_prediction(w, y);
            let rhs = w * C::new(y, 0.0).powc(1.0 - 2.0 * d) * a.f_delta * b.class_prediction(w, y);
            assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn single_class_average_is_the_value() {
        let pi = e11(200_000);
        let g = group(-4, 1);
        let spec = CutoffSpec::central(0.1);
        let r = class_average(&pi, &g, HALF, &spec).unwrap();
        let mut ctx = TwistContext::new(&pi, &g).unwrap();
        let v = ctx.central_value(0, &spec).unwrap();
        assert_eq!(r.computed, v.value);
        assert!(r.computed.norm() > 0.1);
        assert!(r.routes_agree(3.0).unwrap());
        assert_eq!(r.bookkeeping_sum(), r.computed);
    }

    #[test]
    fn class_routes_agree() {
        let pi = e11(200_000);
        let r = class_average(&pi, &group(-23, 1), HALF, &CutoffSpec::central(0.1)).unwrap();
        assert_eq!(r.per_character.len(), 3);
        assert!(r.routes_agree(3.0).unwrap());
        assert!(r.computed.im.abs() < 1e-9);
        assert!((r.bookkeeping_sum() - r.computed).norm() < 1e-15);
        assert!(r.rel_error < 0.2);
    }

    #[test]
    fn galois_averages() {
        let pi = e11(200_000);
        let spec = CutoffSpec::central(0.1);
        let g = group(-23, 1);
        let one = galois_average(&pi, &g, 1, &spec).unwrap();
        let mut ctx = TwistContext::new(&pi, &g).unwrap();
        assert_eq!(one.per_character.len(), 1);
        assert!((one.computed - ctx.central_value(0, &spec).unwrap().value).norm() < 1e-12);
        let full = galois_average(&pi, &g, 3, &spec).unwrap();
        let x = class_average(&pi, &g, HALF, &spec).unwrap();
        assert!((full.computed - x.computed).norm() < 1e-12);
        assert!(full.computed.im.abs() < 1e-9);
        assert!(full.routes_agree(3.0).unwrap());
        let ring = galois_average(&pi, &group(-4, 5), 2, &spec).unwrap();
        assert!(ring.routes_agree(3.0).unwrap());
        assert!(galois_average(&pi, &g, 2, &spec).is_err());
    }

    #[test]
    fn basechange_factorises() {
        let pi = e11(400_000);
        let spec = CutoffSpec::central(0.1);
        let g = group(-3, 1);
        let r = basechange_value(&pi, &CharSpec::Kronecker(5), &g, &spec).unwrap();
        let alt = r.alternate.unwrap();
        assert!(r.computed.norm() > 1e-3, "{}", r.computed);
        assert!((r.computed - alt).norm() < 1e-6 * r.computed.norm());
        let trivial = basechange_value(&pi, &CharSpec::Principal(1), &g, &spec).unwrap();
        let l1 = galois_average(&pi, &g, 1, &spec).unwrap();
        assert!((trivial.computed - l1.computed).norm() < 1e-12);
        assert!(basechange_value(&pi, &CharSpec::Kronecker(-3), &g, &spec).is_err());
    }

    #[test]
    fn basechange_conjugate_characters() {
        let pi = e11(400_000);
        let spec = CutoffSpec::central(0.1);
        let g = group(-3, 1);
        let a = basechange_value(&pi, &CharSpec::Prime { p: 5, k: 1 }, &g, &spec).unwrap();
        let b = basechange_value(&pi, &CharSpec::Prime { p: 5, k: 3 }, &g, &spec).unwrap();
        assert!((a.computed - b.computed.conj()).norm() < 1e-9);
        assert!(a.predicted.re.is_nan());
    }

    #[test]
    fn orthogonality_bookkeeping() {
        for (d0, c) in [(-23, 1), (-47, 1), (-4, 5), (-3, 7)] {
            let g = group(d0, c);
            let chars = g.characters(None).unwrap();
            let reps = g.sparse_reps(1000);
            let sums: Vec<Vec<C>> = chars.iter().map(|x| reps.twisted_counts(x)).collect();
            let principal = class_sum_counts(&g, &[g.identity], 1000);
            for n in 1..=1000 {
                if c > 1 && gcd(n as i64, c as i64) != 1 {
                    continue;
                }
                let mean: C = sums.iter().map(|s| s[n]).sum::<C>() / chars.len() as f64;
                assert!((mean - principal[n]).norm() < 1e-9, "d0={d0} c={c} n={n}");
            }
        }
    }

    #[test]
    fn shifted_convolution_support() {
        let pi = make_provider(&ProviderKind::RamanujanDelta, 400).unwrap();
        let win = SmoothWindow::new(1.0, 2.0).unwrap();
        let s = shifted_convolution(&pi, 1, 100.0, &win).unwrap();
        let mut manual = 0.0;
        for a in -20i64..=20 {
            let n = a * a + 1;
            if (100..=200).contains(&n) {
                manual += pi.coefficient(n as u64).unwrap().re * win.eval(n as f64 / 100.0) / (n as f64).sqrt();
            }
        }
        assert!((s.re - manual).abs() < 1e-14 && s.im == 0.0);
        assert_eq!(win.eval(1.0), 0.0);
        assert_eq!(win.eval(1.5), 1.0);
        assert!(shifted_convolution(&pi, 1, 1000.0, &win).is_err());
        assert!(shifted_convolution(&pi, 0, 100.0, &win).is_err());
    }
}
