//! Zagier lifts, the fractional derivative, ξ-images and pairings, and the
//! classical and weakly holomorphic Shintani lifts.

mod model;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use model::{constant_of_basis, one_dim_eigenform, HarmonicModel};

use crate::arith::{divisors, is_fundamental, is_square, kronecker, l_value_neg, rint, rpow, to_f64, Rational};
use crate::error::{Error, Result};
use crate::hecke::hecke_half;
use crate::numerics::{gamma, poincare_coeff_integral, poincare_normalized_coeffs, EvalReport, NumBudget};
use crate::qseries::{
    plus_allowed, weakly_holo_integral, weakly_holo_plus_basis, weakly_holo_plus_constant, Level, PrincipalPart, QSeries, CUSPLESS_WEIGHTS,
};
use crate::traces::{cycle_trace, modified_trace, modified_trace_tilde, CycleVariant, SeriesEvaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftKind {
    #[serde(rename = "Zd")]
    Zd,
    #[serde(rename = "ZD")]
    ZBigD,
    #[serde(rename = "DD")]
    FractionalDerivative,
    #[serde(rename = "shintani")]
    Shintani,
    #[serde(rename = "shintani_weak")]
    ShintaniWeak,
}

/// Output of a lift: an exact q-series where one is available, numeric
/// holomorphic coefficients keyed by exponent, and numeric c⁻(−n) keyed
/// by n for harmonic outputs.
#[derive(Clone, Debug)]
pub struct LiftResult {
    pub kind: LiftKind,
    pub k: i64,
    pub d: Option<i64>,
    pub big_d: Option<i64>,
    pub exact: Option<QSeries>,
    pub numeric: Option<BTreeMap<i64, EvalReport>>,
    pub nonholomorphic: Option<BTreeMap<i64, EvalReport>>,
    /// exponents skipped because δd is a square
    pub skipped: Vec<i64>,
}

impl LiftResult {
    fn new(kind: LiftKind, k: i64, d: Option<i64>, big_d: Option<i64>) -> Self {
        LiftResult { kind, k, d, big_d, exact: None, numeric: None, nonholomorphic: None, skipped: Vec::new() }
    }

    /// Coefficient at q^n as a float, from the exact part if it covers n.
    pub fn coeff_f64(&self, n: i64) -> Option<EvalReport> {
        if let Some(e) = &self.exact {
            if n <= e.horizon() {
                let c = e.coeff(n).ok()?;
                return Some(EvalReport::real(to_f64(&c), 0.0, NumBudget::default()));
            }
        }
        self.numeric.as_ref()?.get(&n).cloned()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rows = |m: &BTreeMap<i64, EvalReport>| {
            m.iter().map(|(e, r)| serde_json::json!([e, r.value.re, r.value.im, r.est_error])).collect::<Vec<_>>()
        };
        serde_json::json!({
            "lift": self.kind,
            "k": self.k,
            "d": self.d,
            "D": self.big_d,
            "exact": self.exact.as_ref().map(|q| q.to_json_value()),
            "numeric": self.numeric.as_ref().map(rows),
            "nonholomorphic": self.nonholomorphic.as_ref().map(rows),
            "skipped": self.skipped,
        })
    }
}

fn sgn_k(k: i64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn check_fund(disc: i64, want_sign: i64, what: &str) -> Result<()> {
    if !is_fundamental(disc) {
        return Err(Error::Domain(format!(
            "{what} = {disc} is not a fundamental discriminant; compose Hecke operators instead"
        )));
    }
    if disc.signum() != want_sign {
        return Err(Error::Domain(format!("{what} = {disc} has the wrong sign for this k")));
    }
    Ok(())
}

fn is_cuspless(k: i64) -> bool {
    CUSPLESS_WEIGHTS.contains(&(2 * k))
}

/// ξ(M) as a q-series: the stored cusp form times the model's scale when
/// that scale is rational-exact (1), otherwise the caller multiplies by
/// `shadow_scale`. Zero for weakly holomorphic models.
pub fn xi_image(model: &HarmonicModel) -> QSeries {
    if model.is_weakly_holomorphic() {
        return QSeries::zero(4 * model.k as i32, Level::Sl2z, false, model.shadow.horizon());
    }
    model.shadow.clone()
}

/// Coefficient of ξ(M) at q^n rebuilt from c⁻(−n) via
/// (4πn)^{1−κ} c⁻(−n) / Γ(1−κ).
pub fn xi_coefficient(model: &HarmonicModel, n: i64) -> Result<f64> {
    let e = (2 * model.k - 1) as i32;
    Ok((4.0 * PI * n as f64).powi(e) * model.c_minus(n)? / gamma(e as f64))
}

/// {g, M} = (1/6) Σ_n c⁺(n) a_g(−n) for plus-space inputs on Γ₀(4); on
/// SL₂(ℤ) the sum carries no 1/6.
pub fn pairing(g: &QSeries, m_plus: &QSeries) -> Result<Rational> {
    if g.twice_weight() + m_plus.twice_weight() != 4 {
        return Err(Error::Incompatible("pairing needs weights adding to 2".into()));
    }
    if g.level() != m_plus.level() {
        return Err(Error::Incompatible("pairing needs matching levels".into()));
    }
    let mut s = Rational::zero();
    for (&n, c) in m_plus.terms() {
        if -n > g.horizon() {
            return Err(Error::Horizon { needed: -n, have: g.horizon() });
        }
        s += c * g.coeff(-n)?;
    }
    // positive exponents of g pair with negative c⁺ beyond m_plus's reach
    for (&n, a) in g.terms() {
        if n < 0 && -n > m_plus.horizon() && !a.is_zero() {
            return Err(Error::Horizon { needed: -n, have: m_plus.horizon() });
        }
    }
    Ok(match g.level() {
        Level::Gamma04 => s / rint(6),
        Level::Sl2z => s,
    })
}

/// Principal part of 𝔷_D(M):
/// Σ_m c⁺(−m) m^{2k−1} Σ_{n|m} χ_D(n) n^{−k} q^{−(m/n)²|D|}.
pub fn zagier_big_d_principal(terms: &[(i64, Rational)], big_d: i64, k: i64) -> Result<PrincipalPart> {
    let mut pp = PrincipalPart::new();
    for (m, c) in terms {
        for n in divisors(*m as u64) {
            let n = n as i64;
            let chi = kronecker(big_d, n);
            if chi == 0 {
                continue;
            }
            let coef = c * rpow(*m, 2 * k - 1) * rpow(n, -k) * rint(chi);
            pp.add(-(m / n) * (m / n) * big_d.abs(), coef)?;
        }
    }
    Ok(pp)
}

/// Principal part of 𝔷_d(M):
/// Σ_m c⁺(−m) Σ_{n|m} χ_d(n) n^{k−1} q^{−(m/n)²|d|}.
pub fn zagier_d_principal(terms: &[(i64, Rational)], d: i64, k: i64) -> Result<PrincipalPart> {
    let mut pp = PrincipalPart::new();
    for (m, c) in terms {
        for n in divisors(*m as u64) {
            let n = n as i64;
            let chi = kronecker(d, n);
            if chi == 0 {
                continue;
            }
            pp.add(-(m / n) * (m / n) * d.abs(), c * rpow(n, k - 1) * rint(chi))?;
        }
    }
    Ok(pp)
}

/// (1/2) L_d(1−k) c⁺(0).
pub fn zagier_d_constant(model: &HarmonicModel, d: i64) -> Result<Rational> {
    Ok(l_value_neg(d, model.k as usize)? * model.c_plus(0)? / rint(2))
}

fn pp_series(tw: i32, pp: &PrincipalPart, constant: Rational) -> Result<QSeries> {
    let it = pp.0.iter().map(|(e, c)| (*e, c.clone())).chain(std::iter::once((0, constant)));
    QSeries::from_coeffs(tw, Level::Gamma04, true, 0, it)
}

fn need_budget(budget: Option<&NumBudget>) -> Result<&NumBudget> {
    budget.ok_or_else(|| Error::Domain("weights with cusp forms need a numeric budget".into()))
}

/// 𝔷_D(M), weight k + 1/2.
pub fn zagier_big_d(
    model: &HarmonicModel,
    big_d: i64,
    horizon: i64,
    budget: Option<&NumBudget>,
) -> Result<LiftResult> {
    let k = model.k;
    check_fund(big_d, -sgn_k(k), "D")?;
    let tw = (2 * k + 1) as i32;
    let pp = zagier_big_d_principal(&model.principal_terms(), big_d, k)?;
    let mut out = LiftResult::new(LiftKind::ZBigD, k, None, Some(big_d));
    if pp.is_empty() {
        out.exact = Some(QSeries::zero(tw, Level::Gamma04, true, horizon));
        return Ok(out);
    }
    if is_cuspless(k) {
        out.exact = Some(weakly_holo_plus_basis(tw, &pp, horizon)?);
        return Ok(out);
    }
    let budget = need_budget(budget)?;
    out.exact = Some(pp_series(tw, &pp, Rational::zero())?);
    let ns: Vec<i64> = (1..=horizon).filter(|&n| plus_allowed(tw, n)).collect();
    let mut acc: BTreeMap<i64, EvalReport> = BTreeMap::new();
    for (e, c) in &pp.0 {
        let cols = poincare_normalized_coeffs(*e, tw, &ns, budget)?;
        for (n, r) in ns.iter().zip(cols) {
            let r = r.scale(to_f64(c));
            acc.entry(*n).and_modify(|a| *a = a.plus(&r)).or_insert(r);
        }
    }
    out.numeric = Some(acc);
    Ok(out)
}

/// Which computation supplies c⁻(−|δ|) of 𝔷_d(M).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NonholoRoute {
    /// Γ(k − 1/2)·Tr*_{δ,d}(M) from Shintani traces of ξ(M)
    Shadow,
    /// \widetilde{Tr}*_{δ,d}(M) from cycle integrals of (4π)^{k−1}F_{−m}(k;·)
    Cycle,
}

/// 𝔷_d(M), weight 3/2 − k.
pub fn zagier_small_d(
    model: &HarmonicModel,
    d: i64,
    horizon: i64,
    budget: Option<&NumBudget>,
    route: NonholoRoute,
) -> Result<LiftResult> {
    let k = model.k;
    check_fund(d, sgn_k(k), "d")?;
    let tw = (3 - 2 * k) as i32;
    let pp = zagier_d_principal(&model.principal_terms(), d, k)?;
    let constant = zagier_d_constant(model, d)?;
    let mut out = LiftResult::new(LiftKind::Zd, k, Some(d), None);
    if is_cuspless(k) && model.is_weakly_holomorphic() {
        out.exact = Some(if pp.is_empty() {
            // only a constant: no nonzero weakly holomorphic form of negative weight has that shape
            pp_series(tw, &pp, constant)?
        } else if horizon == 0 {
            // deep principal parts make the full form expensive; the constant alone is cheap
            pp_series(tw, &pp, weakly_holo_plus_constant(tw, &pp)?)?
        } else {
            weakly_holo_plus_basis(tw, &pp, horizon)?
        });
        return Ok(out);
    }
    let budget = need_budget(budget)?;
    out.exact = Some(pp_series(tw, &pp, constant)?);
    let s = sgn_k(k);
    // holomorphic coefficients at |δ| with dδ < 0, nonholomorphic at −|δ| with dδ > 0
    let mut holo_d = Vec::new();
    let mut nonholo_d = Vec::new();
    for n in 1..=horizon {
        if !plus_allowed(tw, n) {
            continue;
        }
        let delta = -s * n;
        if delta * d < 0 {
            holo_d.push(delta);
        } else if is_square(delta * d) {
            out.skipped.push(-n);
        } else {
            nonholo_d.push(delta);
        }
    }
    let holo: Vec<Result<(i64, EvalReport)>> = holo_d
        .par_iter()
        .map(|&delta| Ok((delta.abs(), modified_trace(model, delta, d, k, budget)?)))
        .collect();
    out.numeric = Some(holo.into_iter().collect::<Result<_>>()?);
    if !model.is_weakly_holomorphic() || !is_cuspless(k) {
        let g = gamma(k as f64 - 0.5);
        let nonholo: Vec<Result<(i64, EvalReport)>> = nonholo_d
            .par_iter()
            .map(|&delta| {
                let r = match route {
                    NonholoRoute::Shadow => modified_trace(model, delta, d, k, budget)?.scale(g),
                    NonholoRoute::Cycle => modified_trace_tilde(model, delta, d, k, budget)?,
                };
                Ok((delta.abs(), r))
            })
            .collect();
        out.nonholomorphic = Some(nonholo.into_iter().collect::<Result<_>>()?);
    }
    Ok(out)
}

/// M = Σ c_m F_{m,2−2k} from its principal part. Exact in weights without
/// cusp forms; otherwise only the principal part is stored, which is all
/// the 𝔷_D route reads.
pub fn principal_model(k: i64, terms: &[(i64, Rational)]) -> Result<HarmonicModel> {
    let tw = 2 * (2 - 2 * k) as i32;
    if terms.is_empty() {
        return HarmonicModel::weakly_holomorphic(QSeries::zero(tw, Level::Sl2z, false, 0), k);
    }
    if is_cuspless(k) {
        let pp: Vec<(i64, Rational)> = terms.iter().map(|(m, c)| (-m, c.clone())).collect();
        return HarmonicModel::weakly_holomorphic(weakly_holo_integral(2 * k, &pp, 0)?, k);
    }
    let holo = QSeries::from_coeffs(tw, Level::Sl2z, false, 0, terms.iter().map(|(m, c)| (-m, c.clone())))?;
    HarmonicModel::weakly_holomorphic(holo, k)
}

/// Preimage principal part under 𝔷_d: solves for c_m by descending m,
/// using that 𝔷_d(F_m) leads with q^{−m²|d|}.
pub fn invert_zagier_d(g_principal: &PrincipalPart, d: i64, k: i64) -> Result<Vec<(i64, Rational)>> {
    let ad = d.abs();
    let mut resid: BTreeMap<i64, Rational> = g_principal.0.clone();
    let mut top = 0;
    for &e in resid.keys() {
        let q = -e;
        if q % ad != 0 || !is_square(q / ad) {
            return Err(Error::Domain(format!("exponent {e} lies outside the |d|-square class of d = {d}")));
        }
        top = top.max(crate::arith::isqrt((q / ad) as u64) as i64);
    }
    let mut out = Vec::new();
    for m in (1..=top).rev() {
        let c = resid.get(&(-m * m * ad)).cloned().unwrap_or_else(Rational::zero);
        if c.is_zero() {
            continue;
        }
        let image = zagier_d_principal(&[(m, Rational::one())], d, k)?;
        for (e, v) in image.0 {
            *resid.entry(e).or_insert_with(Rational::zero) -= &c * v;
        }
        out.push((m, c));
    }
    if resid.values().any(|v| !v.is_zero()) {
        return Err(Error::Domain("principal part is not in the image of the d-th lift".into()));
    }
    out.reverse();
    Ok(out)
}

/// 𝒟_{d,D}^{k−1/2}(G) = 𝔷_D(𝔷_d^{−1}(G)) for G of weight 3/2 − k.
pub fn fractional_derivative(
    g: &QSeries,
    d: i64,
    big_d: i64,
    k: i64,
    horizon: i64,
    budget: Option<&NumBudget>,
) -> Result<LiftResult> {
    if g.twice_weight() != (3 - 2 * k) as i32 {
        return Err(Error::Incompatible(format!("input has weight {}/2, expected {}/2", g.twice_weight(), 3 - 2 * k)));
    }
    check_fund(d, sgn_k(k), "d")?;
    let terms = invert_zagier_d(&g.principal_part(), d, k)?;
    let model = principal_model(k, &terms)?;
    let mut out = zagier_big_d(&model, big_d, horizon, budget)?;
    out.kind = LiftKind::FractionalDerivative;
    out.d = Some(d);
    Ok(out)
}

/// Coefficients (δd)^{(k−1)/2} Σ χ(Q)𝒞(f;Q) of 𝒮*_d(f) at q^{|δ|}.
pub fn shintani_cusp(f: &QSeries, d: i64, deltas: &[i64], budget: &NumBudget) -> Result<LiftResult> {
    shintani_cusp_scaled(f, 1.0, d, deltas, budget)
}

fn shintani_cusp_scaled(f: &QSeries, scale: f64, d: i64, deltas: &[i64], budget: &NumBudget) -> Result<LiftResult> {
    if f.level() != Level::Sl2z || f.twice_weight() % 4 != 0 {
        return Err(Error::Domain("Shintani lift needs a level-one form of even weight".into()));
    }
    if f.valuation().is_some_and(|v| v < 1) {
        return Err(Error::Domain("Shintani lift needs a cusp form".into()));
    }
    let k = (f.twice_weight() / 4) as i64;
    check_fund(d, sgn_k(k), "d")?;
    let mut out = LiftResult::new(LiftKind::Shintani, k, Some(d), None);
    let mut todo = Vec::new();
    for &delta in deltas {
        if delta * sgn_k(k) <= 0 || !matches!(delta.rem_euclid(4), 0 | 1) {
            return Err(Error::Domain(format!("δ = {delta} is not a discriminant with (−1)^k δ > 0")));
        }
        if is_square(delta * d) {
            out.skipped.push(delta.abs());
        } else {
            todo.push(delta);
        }
    }
    let ev = SeriesEvaluator::scaled(f, scale)?;
    let vals: Vec<Result<(i64, EvalReport)>> = todo
        .par_iter()
        .map(|&delta| {
            let t = cycle_trace(&ev, delta, d, k, CycleVariant::Plain, budget)?;
            Ok((delta.abs(), t.scale(((delta * d) as f64).powf((k - 1) as f64 / 2.0))))
        })
        .collect();
    out.numeric = Some(vals.into_iter().collect::<Result<_>>()?);
    Ok(out)
}

/// (1/3)(−1)^{⌊k/2⌋}2^{k−1}, the factor between 𝒮*_{d,D} and 𝒮*_d on cusp forms.
pub fn shintani_proportionality(k: i64) -> f64 {
    let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    s * 2f64.powi((k - 1) as i32) / 3.0
}

/// 𝒮*_{d,D}(f) for f ∈ S^!_{2k} with vanishing constant term.
///
/// f splits as f₀ + f₁ with f₁ orthogonal to cusp forms. The f₁ part goes
/// through 𝔷_D after undoing 𝒟^{2k−1} on principal parts; the cusp part
/// f₀ goes through the classical Shintani lift scaled by
/// `shintani_proportionality`. Only weights with dim S_{2k} ≤ 1 are handled.
pub fn shintani_weak(
    f: &QSeries,
    d: i64,
    big_d: i64,
    horizon: i64,
    budget: Option<&NumBudget>,
) -> Result<LiftResult> {
    if f.level() != Level::Sl2z || f.twice_weight() % 4 != 0 || f.twice_weight() <= 0 {
        return Err(Error::Domain("expected a level-one form of positive even weight".into()));
    }
    let k = (f.twice_weight() / 4) as i64;
    if !f.coeff(0)?.is_zero() {
        return Err(Error::Domain("weakly holomorphic Shintani lift needs a vanishing constant term".into()));
    }
    check_fund(d, sgn_k(k), "d")?;
    check_fund(big_d, -sgn_k(k), "D")?;
    let terms: Vec<(i64, Rational)> = f
        .terms()
        .filter(|(e, _)| **e < 0)
        .map(|(e, a)| (-e, a / rpow(*e, 2 * k - 1)))
        .collect();
    let model = principal_model(k, &terms)?;
    let mut out = zagier_big_d(&model, big_d, horizon, budget)?;
    out.kind = LiftKind::ShintaniWeak;
    out.d = Some(d);
    if is_cuspless(k) {
        return Ok(out);
    }
    // cusp part: a_{f₀}(1) = a_f(1) − Σ_m a_f(−m)·a_{P_{−m}}(1)
    let budget = need_budget(budget)?;
    let eig = one_dim_eigenform(2 * k, horizon.max(2))?;
    let mut a1 = EvalReport::real(to_f64(&f.coeff(1)?), 0.0, *budget);
    for (&e, a) in f.terms() {
        if e < 0 {
            a1 = a1.plus(&poincare_coeff_integral(e, 2 * k, 1, budget)?.scale(-to_f64(a)));
        }
    }
    let tw = (2 * k + 1) as i32;
    let deltas: Vec<i64> = (1..=horizon).filter(|&n| plus_allowed(tw, n)).map(|n| sgn_k(k) * n).collect();
    let cusp = shintani_cusp_scaled(&eig, a1.value.re * shintani_proportionality(k), d, &deltas, budget)?;
    let mut num = out.numeric.take().unwrap_or_default();
    for (n, r) in cusp.numeric.unwrap_or_default() {
        let r = EvalReport::new(r.value, r.est_error + a1.est_error * r.value.norm() / a1.value.norm().max(1e-300), *budget);
        num.entry(n).and_modify(|a| *a = a.plus(&r)).or_insert(r);
    }
    out.numeric = Some(num);
    out.skipped = cusp.skipped;
    Ok(out)
}

/// F|T(p²) − λF and whether it lies in 𝕁^D = 𝔷_D(S^!_{2−2k}).
#[derive(Clone, Debug)]
pub struct EigenDefect {
    pub defect: QSeries,
    pub member_of_jd: bool,
    /// preimage principal part Σ c_m q^{−m} when the defect is a 𝔷_D image
    pub preimage: Vec<(i64, Rational)>,
}

/// Principal part Σ c_m q^{−m} of the M with 𝔷_D(M) having principal part
/// `pp` (triangular in m, leading coefficient m^{2k−1}).
fn invert_zagier_big_d(pp: &PrincipalPart, big_d: i64, k: i64) -> Result<Option<Vec<(i64, Rational)>>> {
    let ad = big_d.abs();
    let mut resid = pp.0.clone();
    let mut top = 0;
    for &e in resid.keys() {
        let q = -e;
        if q % ad != 0 || !is_square(q / ad) {
            return Ok(None);
        }
        top = top.max(crate::arith::isqrt((q / ad) as u64) as i64);
    }
    let mut out = Vec::new();
    for m in (1..=top).rev() {
        let lead = resid.get(&(-m * m * ad)).cloned().unwrap_or_else(Rational::zero);
        if lead.is_zero() {
            continue;
        }
        let c = lead / rpow(m, 2 * k - 1);
        let image = zagier_big_d_principal(&[(m, Rational::one())], big_d, k)?;
        for (e, v) in image.0 {
            *resid.entry(e).or_insert_with(Rational::zero) -= &c * v;
        }
        out.push((m, c));
    }
    if resid.values().any(|v| !v.is_zero()) {
        return Ok(None);
    }
    out.reverse();
    Ok(Some(out))
}

/// Decides whether F|T(p²) − λF lies in 𝕁^D. Exact regime only.
pub fn eigenform_defect(f: &QSeries, big_d: i64, p: u64, lambda: &Rational) -> Result<EigenDefect> {
    let tw = f.twice_weight();
    if tw % 2 == 0 || tw < 5 {
        return Err(Error::Domain("expected a plus-space form of weight k + 1/2, k >= 2".into()));
    }
    let k = ((tw - 1) / 2) as i64;
    if !is_cuspless(k) {
        return Err(Error::Domain(format!("weight {tw}/2 is outside the exact regime")));
    }
    check_fund(big_d, -sgn_k(k), "D")?;
    let tf = hecke_half(f, p)?;
    let h = tf.horizon();
    let defect = tf.sub(&f.truncate(h)?.scale(lambda))?;
    let no = |defect| Ok(EigenDefect { defect, member_of_jd: false, preimage: Vec::new() });
    let Some(pre) = invert_zagier_big_d(&defect.principal_part(), big_d, k)? else {
        return no(defect);
    };
    // S^!_{2−2k}: the preimage must have vanishing constant term
    let c0: Rational = pre.iter().map(|(m, c)| c * constant_of_basis(k, *m)).sum();
    if !c0.is_zero() {
        return no(defect);
    }
    let model = principal_model(k, &pre)?;
    let image = zagier_big_d(&model, big_d, h, None)?.exact.expect("exact regime");
    let member = image.agrees_to(&defect, h)?;
    Ok(EigenDefect { defect, member_of_jd: member, preimage: if member { pre } else { Vec::new() } })
}

/// The λ for which F|T(p²) − λF lies in 𝕁^D, if any. The membership
/// conditions are affine in λ, so two trial values pin it down.
pub fn find_eigenvalue(f: &QSeries, big_d: i64, p: u64) -> Result<Option<Rational>> {
    let tw = f.twice_weight();
    let k = ((tw - 1) / 2) as i64;
    let tf = hecke_half(f, p)?;
    let fh = f.truncate(tf.horizon())?;
    // constant term of the preimage, as a function of λ
    let c0_at = |lam: &Rational| -> Result<Option<Rational>> {
        let defect = tf.sub(&fh.scale(lam))?;
        Ok(invert_zagier_big_d(&defect.principal_part(), big_d, k)?
            .map(|pre| pre.iter().map(|(m, c)| c * constant_of_basis(k, *m)).sum()))
    };
    let (Some(a), Some(b)) = (c0_at(&Rational::zero())?, c0_at(&Rational::one())?) else {
        return Ok(None);
    };
    if a == b {
        return Ok(if a.is_zero() { Some(Rational::zero()) } else { None });
    }
    let lam = &a / (&a - &b);
    let res = eigenform_defect(f, big_d, p, &lam)?;
    Ok(res.member_of_jd.then_some(lam))
}
