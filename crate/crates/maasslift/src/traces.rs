//! Twisted traces of CM values, cycle integrals along closed geodesics and
//! their twisted traces, and the modified traces Tr* used as coefficients
//! of the Zagier lifts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_fundamental, to_f64};
use crate::bqf::{automorph, enumerate_classes, genus_character, geodesic, heegner_point, mobius, BQForm, Mat2};
use crate::error::{Error, Result};
use crate::lifts::HarmonicModel;
use crate::numerics::special::gauss_legendre;
use crate::numerics::{gamma, niebur_eval, reduce_to_fundamental, EvalReport, NumBudget};
use crate::qseries::{Level, QSeries};

/// A point evaluator of a function transforming with integral weight under
/// SL₂(ℤ). Weight 0 means invariant.
pub trait Evaluator: Sync {
    fn weight(&self) -> i64;
    fn eval(&self, tau: Complex64, budget: &NumBudget) -> Result<EvalReport>;
}

/// Level-one form given by an exact q-expansion, evaluated after moving τ
/// to the fundamental domain.
pub struct SeriesEvaluator {
    weight: i64,
    coeffs: Vec<(i64, f64)>,
    horizon: i64,
    scale: f64,
}

impl SeriesEvaluator {
    pub fn new(f: &QSeries) -> Result<Self> {
        Self::scaled(f, 1.0)
    }

    pub fn scaled(f: &QSeries, scale: f64) -> Result<Self> {
        if f.level() != Level::Sl2z || f.twice_weight() % 4 != 0 {
            return Err(Error::Domain("series evaluator needs an even-weight level-one form".into()));
        }
        Ok(SeriesEvaluator {
            weight: (f.twice_weight() / 2) as i64,
            coeffs: f.terms().map(|(&n, a)| (n, to_f64(a))).collect(),
            horizon: f.horizon(),
            scale,
        })
    }

    /// Tail estimate past the horizon at height y, from the geometric
    /// growth of the last two known coefficients.
    fn tail(&self, y: f64) -> f64 {
        let h = self.horizon;
        let last = |n: i64| self.coeffs.iter().find(|(e, _)| *e == n).map(|(_, a)| a.abs()).unwrap_or(0.0);
        let (a1, a0) = (last(h), last(h - 1));
        let q = (-2.0 * PI * y).exp();
        let growth = if a0 > 0.0 { (a1 / a0).max(1.0) } else { 2.0 };
        let ratio = growth * q;
        let base = a1.max(a0) * (-2.0 * PI * h as f64 * y).exp();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        base * ratio / (1.0 - ratio)
    }
}

impl Evaluator for SeriesEvaluator {
    fn weight(&self) -> i64 {
        self.weight
    }

    fn eval(&self, tau: Complex64, budget: &NumBudget) -> Result<EvalReport> {
        let (z, g) = reduce_to_fundamental(tau)?;
        let mut acc = Complex64::new(0.0, 0.0);
        let q = Complex64::from_polar((-2.0 * PI * z.im).exp(), 2.0 * PI * z.re);
        // coefficients are sparse but ordered; step powers of q incrementally
        let mut e = self.coeffs.first().map(|c| c.0).unwrap_or(0);
        let mut qe = q.powi(e as i32);
        for &(n, a) in &self.coeffs {
            while e < n {
                qe *= q;
                e += 1;
            }
            acc += qe * a;
        }
        // f(τ) = (cτ + d)^{−w} f(γτ)
        let j = tau * g[1][0] as f64 + g[1][1] as f64;
        let factor = j.powi(-(self.weight as i32)) * self.scale;
        let tail = self.tail(z.im) * factor.norm();
        Ok(EvalReport::new(acc * factor, tail, *budget))
    }
}

/// scale · F_m(s; τ).
pub struct NieburEvaluator {
    pub m: i64,
    pub s: f64,
    pub scale: f64,
}

impl Evaluator for NieburEvaluator {
    fn weight(&self) -> i64 {
        0
    }

    fn eval(&self, tau: Complex64, budget: &NumBudget) -> Result<EvalReport> {
        Ok(niebur_eval(self.m, self.s, tau, budget)?.scale(self.scale))
    }
}

/// Wraps a closure; the closure is trusted to have the stated weight.
pub struct FnEvaluator<F> {
    pub weight: i64,
    pub f: F,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> Evaluator for FnEvaluator<F> {
    fn weight(&self) -> i64 {
        self.weight
    }

    fn eval(&self, tau: Complex64, budget: &NumBudget) -> Result<EvalReport> {
        Ok(EvalReport::new((self.f)(tau), 0.0, *budget))
    }
}

/// χ on forms of discriminant d1·d2, taken with respect to whichever of the
/// two is fundamental (the first one if both are).
fn trace_character(q: &BQForm, d1: i64, d2: i64) -> Result<i64> {
    if is_fundamental(d1) || !is_fundamental(d2) {
        genus_character(q, d1, d2)
    } else {
        genus_character(q, d2, d1)
    }
}

fn sum_reports(parts: Vec<EvalReport>, budget: &NumBudget) -> EvalReport {
    parts.iter().fold(EvalReport::real(0.0, 0.0, *budget), |acc, r| acc.plus(r))
}

/// Σ_{Q ∈ SL₂(ℤ)\𝒬_{D₁D₂}} χ(Q) F(τ_Q) / ω_Q over positive definite classes.
pub fn cm_trace(f: &dyn Evaluator, d1: i64, d2: i64, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    if d1 * d2 >= 0 {
        return Err(Error::Domain(format!("CM traces need D1·D2 < 0, got {d1}·{d2}")));
    }
    if f.weight() != 0 {
        return Err(Error::Domain("CM traces need an invariant function".into()));
    }
    let classes = enumerate_classes(d1 * d2)?;
    let parts: Vec<Result<EvalReport>> = classes
        .reps
        .par_iter()
        .map(|q| {
            let chi = trace_character(q, d1, d2)?;
            if chi == 0 {
                return Ok(EvalReport::real(0.0, 0.0, *budget));
            }
            let (tau, omega) = heegner_point(q)?;
            Ok(f.eval(tau, budget)?.scale(chi as f64 / omega as f64))
        })
        .collect();
    Ok(sum_reports(parts.into_iter().collect::<Result<_>>()?, budget))
}

const PANEL_THRESHOLD: f64 = 1e-10;
const MAX_PANELS: usize = 1 << 14;

/// 𝒞(F;Q) = Δ^{(1−κ)/2} ∫_{C_Q} F(τ) Q(τ,1)^{κ−1} dτ.
///
/// The value is a class invariant, so the integral is taken over the
/// reduced form equivalent to Q, starting at the top of its geodesic. Forms
/// with large coefficients have tiny geodesics close to the real line where
/// F loses precision.
pub fn cycle_integral(f: &dyn Evaluator, q: &BQForm, budget: &NumBudget) -> Result<EvalReport> {
    let (r, _) = q.reduce_indefinite()?;
    cycle_integral_from(f, &r, PI / 2.0, budget)
}

/// As `cycle_integral`, with the arc starting at angle `theta0` on S_Q.
pub fn cycle_integral_from(f: &dyn Evaluator, q: &BQForm, theta0: f64, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    let geo = geodesic(q)?;
    if !(0.0 < theta0 && theta0 < PI) {
        return Err(Error::Domain(format!("start angle {theta0} is not on the semicircle")));
    }
    let g = automorph(q)?;
    let t0 = (theta0 / 2.0).tan().ln();
    let t1 = end_param(&g, geo.center, geo.radius, t0, geo.orientation)?;
    if f.weight() % 2 != 0 {
        return Err(Error::Domain("cycle integrals need even weight 2κ".into()));
    }
    let kappa = f.weight() / 2;
    let disc = q.disc() as f64;
    let pref = disc.powf((1 - kappa) as f64 / 2.0);
    let (a, r) = (q.a as f64, geo.radius);

    // hyperbolic arclength t with tan(θ/2) = e^t; then cos θ = −tanh t,
    // sin θ = sech t, Q(τ,1) = 2i a r² sin θ e^{iθ} and dτ = i r e^{iθ} sin θ dt
    let integrand = |t: f64| -> Result<(Complex64, f64)> {
        let (sin, cos) = (1.0 / t.cosh(), -t.tanh());
        let e = Complex64::new(cos, sin);
        let tau = geo.center + e * r;
        let v = f.eval(tau, budget)?;
        let qv = (Complex64::new(0.0, 2.0 * a * r * r * sin) * e).powi((kappa - 1) as i32);
        let dtau = Complex64::new(0.0, r * sin) * e;
        Ok((v.value * qv * dtau * pref, v.est_error * (qv * dtau).norm() * pref))
    };
    let gl = gauss_legendre(budget.quad_depth as usize);
    let panel = |a: f64, b: f64| -> Result<(Complex64, f64)> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let (v, e) = integrand(mid + half * x)?;
            s += v * (w * half);
            err += e * (w * half).abs();
        }
        Ok((s, err))
    };

    let total_len = (t1 - t0).abs();
    let mut stack: Vec<(f64, f64, (Complex64, f64))> = Vec::new();
    let pieces = 8;
    for i in 0..pieces {
        let a = t0 + (t1 - t0) * i as f64 / pieces as f64;
        let b = t0 + (t1 - t0) * (i + 1) as f64 / pieces as f64;
        stack.push((a, b, panel(a, b)?));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let (mut quad_err, mut eval_err) = (0.0, 0.0);
    let mut panels = 0usize;
    while let Some((a, b, whole)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Err(Error::Budget(format!("cycle integral for {q:?} did not converge")));
        }
        let m = 0.5 * (a + b);
        let (l, r) = (panel(a, m)?, panel(m, b)?);
        let both = l.0 + r.0;
        let diff = (both - whole.0).norm();
        let share = (b - a).abs() / total_len;
        if diff <= (budget.tol * share).max(PANEL_THRESHOLD * both.norm()) {
            value += both;
            quad_err += diff;
            eval_err += l.1 + r.1;
        } else {
            stack.push((a, m, l));
            stack.push((m, b, r));
        }
    }
    Ok(EvalReport::new(value, quad_err + eval_err, *budget))
}

/// Arclength parameter of the endpoint g_Q^{±1}τ₀, picking the power that
/// moves along S_Q in its orientation (θ increasing when a > 0).
fn end_param(g: &Mat2, center: f64, radius: f64, t0: f64, orientation: i64) -> Result<f64> {
    let tau0 = center + Complex64::new(-t0.tanh(), 1.0 / t0.cosh()) * radius;
    let ginv: Mat2 = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]];
    for m in [g, &ginv] {
        let u = mobius(m, tau0) - center;
        let n = u.norm();
        // tan(θ/2) in whichever form avoids cancellation
        let half_tan = if u.re >= 0.0 { u.im / (n + u.re) } else { (n - u.re) / u.im };
        let t = half_tan.ln();
        if (t - t0) * orientation as f64 > 0.0 {
            return Ok(t);
        }
    }
    Err(Error::Domain("automorph does not move along the geodesic".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleVariant {
    /// −(−1)^k 2^{k−2}/(3√π) Σ χ(Q)𝒞(f;Q)
    Shintani,
    /// Γ((k+1)/2)/(2√π Γ(k/2)) Σ χ(Q)𝒞(F;Q)
    Tilde,
    /// Σ χ(Q)𝒞(F;Q) without prefactor
    Plain,
}

impl CycleVariant {
    pub fn prefactor(self, k: i64) -> f64 {
        let kf = k as f64;
        match self {
            CycleVariant::Shintani => {
                let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
                -sgn * 2f64.powi((k - 2) as i32) / (3.0 * PI.sqrt())
            }
            CycleVariant::Tilde => gamma((kf + 1.0) / 2.0) / (2.0 * PI.sqrt() * gamma(kf / 2.0)),
            CycleVariant::Plain => 1.0,
        }
    }
}

/// Twisted trace of cycle integrals over SL₂(ℤ)\𝒬_{δd}.
pub fn cycle_trace(
    f: &dyn Evaluator,
    delta: i64,
    d: i64,
    k: i64,
    variant: CycleVariant,
    budget: &NumBudget,
) -> Result<EvalReport> {
    budget.validate()?;
    if delta * d <= 0 {
        return Err(Error::Domain(format!("cycle traces need δd > 0, got {delta}·{d}")));
    }
    let classes = enumerate_classes(delta * d)?;
    let parts: Vec<Result<EvalReport>> = classes
        .reps
        .par_iter()
        .map(|q| {
            let chi = trace_character(q, d, delta)?;
            if chi == 0 {
                return Ok(EvalReport::real(0.0, 0.0, *budget));
            }
            Ok(cycle_integral(f, q, budget)?.scale(chi as f64))
        })
        .collect();
    let sum = sum_reports(parts.into_iter().collect::<Result<_>>()?, budget);
    Ok(sum.scale(variant.prefactor(k)))
}

fn sign_floor(x: i64) -> f64 {
    if x.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Tr*_{D₁,D₂}(M).
///
/// For D₁D₂ < 0 this is the CM route, with R^{k−1}F_{m,2−2k} realized as
/// (4π)^{k−1}F_{−m}(k;·), so only the principal part of M enters. For
/// D₁D₂ > 0 it is the shadow route through Shintani traces of ξ(M).
pub fn modified_trace(model: &HarmonicModel, d1: i64, d2: i64, k: i64, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    if model.k != k {
        return Err(Error::Incompatible(format!("model has k = {}, asked for k = {k}", model.k)));
    }
    let sk = if k % 2 == 0 { 1 } else { -1 };
    if d1 * d2 < 0 {
        if sk * d1 > 0 && sk * d2 < 0 {
            return cm_modified(model, d1, d2, k, budget);
        }
        if sk * d2 > 0 && sk * d1 < 0 {
            return Ok(cm_modified(model, d2, d1, k, budget)?.scale(-1.0));
        }
    } else if sk * d1 > 0 && sk * d2 > 0 {
        return shadow_modified(model, d1, d2, k, budget);
    }
    Err(Error::Domain(format!("sign pattern of ({d1}, {d2}) does not fit k = {k}")))
}

fn cm_modified(model: &HarmonicModel, d1: i64, d2: i64, k: i64, budget: &NumBudget) -> Result<EvalReport> {
    let kf = k as f64;
    let raise = (4.0 * PI).powf(kf - 1.0);
    let mut acc = EvalReport::real(0.0, 0.0, *budget);
    for (m, c) in model.principal_terms() {
        let ev = NieburEvaluator { m: -m, s: kf, scale: raise };
        acc = acc.plus(&cm_trace(&ev, d1, d2, budget)?.scale(to_f64(&c)));
    }
    let pref = sign_floor((k + 1).div_euclid(2))
        * (4.0 * PI).powf(1.0 - kf)
        * (d1.abs() as f64).powf((kf - 1.0) / 2.0)
        * (d2.abs() as f64).powf(-kf / 2.0);
    Ok(acc.scale(pref))
}

/// Tr*_{δ,d}(M) = (−1)^{⌊1−k/2⌋}(4π)^{1−k}|d|^{(k−1)/2}|δ|^{−k/2} Tr_{δ,d}(ξM).
fn shadow_modified(model: &HarmonicModel, delta: i64, d: i64, k: i64, budget: &NumBudget) -> Result<EvalReport> {
    let kf = k as f64;
    let pref = sign_floor((2 - k).div_euclid(2))
        * (4.0 * PI).powf(1.0 - kf)
        * (d.abs() as f64).powf((kf - 1.0) / 2.0)
        * (delta.abs() as f64).powf(-kf / 2.0);
    if model.is_weakly_holomorphic() {
        return Ok(EvalReport::real(0.0, 0.0, *budget));
    }
    let ev = SeriesEvaluator::scaled(&model.shadow, model.shadow_scale)?;
    let tr = cycle_trace(&ev, delta, d, k, CycleVariant::Shintani, budget)?;
    let rel = model.shadow_scale_err / model.shadow_scale.abs();
    let tr = EvalReport::new(tr.value, tr.est_error + rel * tr.value.norm(), *budget);
    Ok(tr.scale(pref))
}

/// \widetilde{Tr}*_{δ,d}(M) for δd > 0 through the Niebur route: the tilde
/// cycle trace of R^{k−1}M = Σ c⁺(−m)(4π)^{k−1}F_{−m}(k;·).
pub fn modified_trace_tilde(
    model: &HarmonicModel,
    delta: i64,
    d: i64,
    k: i64,
    budget: &NumBudget,
) -> Result<EvalReport> {
    budget.validate()?;
    if delta * d <= 0 {
        return Err(Error::Domain(format!("tilde traces need δd > 0, got {delta}·{d}")));
    }
    let kf = k as f64;
    let raise = (4.0 * PI).powf(kf - 1.0);
    let mut acc = EvalReport::real(0.0, 0.0, *budget);
    for (m, c) in model.principal_terms() {
        let ev = NieburEvaluator { m: -m, s: kf, scale: raise };
        acc = acc.plus(&cycle_trace(&ev, delta, d, k, CycleVariant::Tilde, budget)?.scale(to_f64(&c)));
    }
    let pref = sign_floor((2 - k).div_euclid(2))
        * (4.0 * PI).powf(1.0 - kf)
        * (d.abs() as f64).powf((kf - 1.0) / 2.0)
        * (delta.abs() as f64).powf(-kf / 2.0);
    Ok(acc.scale(pref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};
    use crate::qseries::{delta as delta_series, j_invariant, unit_principal, weakly_holo_plus_basis};

    fn j744(h: i64) -> QSeries {
        let j = j_invariant(h).unwrap();
        let c = QSeries::from_coeffs(0, Level::Sl2z, false, h, [(0, rint(744))]).unwrap();
        j.sub(&c).unwrap()
    }

    #[test]
    fn singular_moduli() {
        let b = NumBudget { tol: 1e-9, ..NumBudget::default() };
        let ev = SeriesEvaluator::new(&j744(60)).unwrap();
        let t3 = cm_trace(&ev, 1, -3, &b).unwrap();
        assert!((t3.value.re + 248.0).abs() < 1e-6, "{}", t3.value);
        let t4 = cm_trace(&ev, 1, -4, &b).unwrap();
        assert!((t4.value.re - 492.0).abs() < 1e-6, "{}", t4.value);
        // j(√−2) = 8000, j((1+√−7)/2) = −3375
        let t8 = cm_trace(&ev, 1, -8, &b).unwrap();
        assert!((t8.value.re - (8000.0 - 744.0)).abs() < 1e-6);
        let t7 = cm_trace(&ev, -7, 1, &b).unwrap();
        assert!((t7.value.re - (-3375.0 - 744.0)).abs() < 1e-6);
        assert!(cm_trace(&ev, 5, 8, &b).is_err());
    }

    #[test]
    fn series_evaluator_is_modular() {
        let b = NumBudget::default();
        let ev = SeriesEvaluator::new(&delta_series(40).unwrap()).unwrap();
        let t = Complex64::new(0.13, 0.31);
        let lhs = ev.eval(-t.inv(), &b).unwrap().value;
        let rhs = ev.eval(t, &b).unwrap().value * t.powi(12);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn unit_integral_closed_form() {
        let b = NumBudget { tol: 1e-12, ..NumBudget::default() };
        let one = FnEvaluator { weight: 0, f: |_| Complex64::new(1.0, 0.0) };
        let q = BQForm::new(1, 1, -1).unwrap();
        let want = 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln();
        let c = cycle_integral(&one, &q, &b).unwrap();
        assert!((c.value.re - want).abs() < 1e-10, "{}", c.value);
        // −Q runs the other way round the same circle
        let cn = cycle_integral(&one, &q.neg(), &b).unwrap();
        assert!((cn.value.re - want).abs() < 1e-10);
        // Δ = 12: ε = 2 + √3
        let q12 = BQForm::new(1, 0, -3).unwrap();
        let c12 = cycle_integral(&one, &q12, &b).unwrap();
        assert!((c12.value.re - 2.0 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-10);
    }

    #[test]
    fn base_point_and_class_invariance() {
        let b = NumBudget { tol: 1e-10, ..NumBudget::default() };
        let ev = SeriesEvaluator::new(&delta_series(40).unwrap()).unwrap();
        let q = BQForm::new(2, 1, -2).unwrap();
        let c0 = cycle_integral(&ev, &q, &b).unwrap();
        let c1 = cycle_integral_from(&ev, &q, 1.1, &b).unwrap();
        assert!((c0.value - c1.value).norm() < 2.0 * b.tol.max(c0.est_error + c1.est_error));
        let g: Mat2 = [[2, 1], [1, 1]];
        let qg = q.act(&g).unwrap();
        let c2 = cycle_integral(&ev, &qg, &b).unwrap();
        assert!((c0.value - c2.value).norm() < 2.0 * b.tol.max(c0.est_error + c2.est_error), "{} {}", c0.value, c2.value);
    }

    #[test]
    fn zero_and_linearity() {
        let b = NumBudget { tol: 1e-10, ..NumBudget::default() };
        let zero = FnEvaluator { weight: 12, f: |_| Complex64::new(0.0, 0.0) };
        let z = cycle_trace(&zero, 8, 5, 6, CycleVariant::Shintani, &b).unwrap();
        assert_eq!(z.value, Complex64::new(0.0, 0.0));
        let d = delta_series(40).unwrap();
        let e1 = SeriesEvaluator::new(&d).unwrap();
        let e3 = SeriesEvaluator::new(&d.scale(&rat(3, 1))).unwrap();
        let t1 = cycle_trace(&e1, 8, 5, 6, CycleVariant::Shintani, &b).unwrap();
        let t3 = cycle_trace(&e3, 8, 5, 6, CycleVariant::Shintani, &b).unwrap();
        assert!((t3.value - t1.value * 3.0).norm() < 1e-9 * t3.value.norm());
    }

    #[test]
    fn modified_trace_matches_exact_plus_form() {
        // k = 2: Tr*_{5,−4}(F₁) is the q⁵ coefficient of q⁻⁴ + O(q) in weight 5/2
        let b = NumBudget { coset_c_max: 128, tol: 1e-9, ..NumBudget::default() };
        let model = HarmonicModel::basis(2, 1, 5).unwrap();
        let g = weakly_holo_plus_basis(5, &unit_principal(-4).unwrap(), 6).unwrap();
        let want = to_f64(&g.coeff(5).unwrap());
        let t = modified_trace(&model, 5, -4, 2, &b).unwrap();
        assert!((t.value.re - want).abs() < 1e-3, "{} vs {want}", t.value);
        let anti = modified_trace(&model, -4, 5, 2, &b).unwrap();
        assert!((anti.value + t.value).norm() < 1e-12);
        assert!(modified_trace(&model, -4, -3, 2, &b).is_err());
        // weakly holomorphic model through the shadow route
        let z = modified_trace(&model, 5, 8, 2, &b).unwrap();
        assert_eq!(z.value, Complex64::new(0.0, 0.0));
    }
}
