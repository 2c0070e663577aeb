//! Fourier coefficients of Poincaré series via Kloosterman–Bessel sums,
//! and the special values of the modified Whittaker function at the two
//! harmonic spectral parameters.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::kloosterman::kloosterman_row;
use super::special::{bessel_i, bessel_j, gamma, inc_gamma};
use super::{EvalReport, NumBudget};
use crate::arith::{gcd, inv_mod};
use crate::error::{Error, Result};
use crate::qseries::plus_allowed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicBranch {
    /// s = κ/2
    HalfKappa,
    /// s = 1 − κ/2
    OneMinusHalfKappa,
}

/// 𝒲_{n,κ}(s; y) at s ∈ {κ/2, 1 − κ/2}.
pub fn whittaker_special(kappa: f64, n: i64, y: f64, branch: HarmonicBranch) -> Result<f64> {
    if y <= 0.0 {
        return Err(Error::Domain(format!("need y > 0, got {y}")));
    }
    let nn = n.unsigned_abs() as f64;
    if n > 0 {
        return Ok((4.0 * PI * nn).powf(kappa / 2.0) * (-2.0 * PI * nn * y).exp());
    }
    match branch {
        HarmonicBranch::HalfKappa => Ok(0.0),
        HarmonicBranch::OneMinusHalfKappa => {
            if n == 0 {
                return Err(Error::Domain("n = 0 has no special value on this branch".into()));
            }
            let a = 1.0 - kappa;
            if a <= 0.0 && a.fract() == 0.0 {
                return Err(Error::Domain(format!("Γ(1−κ) is infinite at κ = {kappa}")));
            }
            let x = 4.0 * PI * nn * y;
            Ok((4.0 * PI * nn).powf(kappa / 2.0) / gamma(a) * (2.0 * PI * nn * y).exp() * inc_gamma(a, x)?)
        }
    }
}

/// Σ_{c ≤ C} f(i, c) for every index i, returned both for C and for C/2.
/// Terms are produced per c in parallel and accumulated in ascending c.
fn ascending_sum<F>(width: usize, c_max: u64, f: F) -> (Vec<Complex64>, Vec<Complex64>)
where
    F: Fn(u64) -> Vec<Complex64> + Sync,
{
    let terms: Vec<Vec<Complex64>> = (1..=c_max).into_par_iter().map(&f).collect();
    let mut full = vec![Complex64::new(0.0, 0.0); width];
    let mut half = full.clone();
    for (i, t) in terms.iter().enumerate() {
        let c = i as u64 + 1;
        for (acc, v) in full.iter_mut().zip(t) {
            *acc += v;
        }
        if c == c_max / 2 {
            half.clone_from(&full);
        }
    }
    (full, half)
}

fn reports(full: Vec<Complex64>, half: Vec<Complex64>, budget: &NumBudget) -> Vec<EvalReport> {
    full.into_iter().zip(half).map(|(a, b)| EvalReport::new(a, (a - b).norm(), *budget)).collect()
}

fn check_half(tw: i32, m: i64, s: f64) -> Result<()> {
    if tw % 2 == 0 {
        return Err(Error::Domain(format!("half-integral weight expected, got {tw}/2")));
    }
    if m == 0 || !plus_allowed(tw, m) {
        return Err(Error::Domain(format!("index {m} is not an admissible discriminant for weight {tw}/2")));
    }
    if s <= 1.0 {
        return Err(Error::Domain(format!("the Poincaré series needs s > 1, got {s}")));
    }
    Ok(())
}

/// b_{m,κ}(s; n) for several n at once.
pub fn poincare_coeffs_half(m: i64, tw: i32, s: f64, ns: &[i64], budget: &NumBudget) -> Result<Vec<EvalReport>> {
    budget.validate()?;
    check_half(tw, m, s)?;
    let sign = if ((tw as i64 + 1).div_euclid(4)) % 2 == 0 { 1.0 } else { -1.0 };
    let nu = 2.0 * s - 1.0;
    let mf = m as f64;
    let term = |c: u64| -> Vec<Complex64> {
        let row = kloosterman_row(tw, m, c);
        let cf = c as f64;
        ns.iter()
            .map(|&n| {
                let nf = n as f64;
                let w = if n == 0 {
                    2.0 * PI.powf(s) * mf.abs().powf(s) / (4.0 * cf).powf(2.0 * s)
                } else {
                    let x = PI * (mf * nf).abs().sqrt() / cf;
                    let b = if mf * nf < 0.0 { bessel_i(nu, x) } else { bessel_j(nu, x) };
                    (mf / nf).abs().sqrt() / (4.0 * cf) * b.unwrap_or(f64::NAN)
                };
                row.eval(n) * w
            })
            .collect()
    };
    let (full, half) = ascending_sum(ns.len(), budget.kloosterman_c_max, term);
    let out = reports(full, half, budget);
    if out.iter().any(|r| !r.value.re.is_finite()) {
        return Err(Error::Budget("Bessel evaluation out of range".into()));
    }
    Ok(out.into_iter().map(|r| r.scale(2.0 * PI * sign)).collect())
}

pub fn poincare_coeff_half(m: i64, tw: i32, s: f64, n: i64, budget: &NumBudget) -> Result<EvalReport> {
    Ok(poincare_coeffs_half(m, tw, s, &[n], budget)?.remove(0))
}

/// Coefficients of the weakly holomorphic form with principal part q^m
/// (m < 0) at s = κ/2: b(n)·(n/|m|)^{κ/2} for n ≥ 1.
pub fn poincare_normalized_coeffs(m: i64, tw: i32, ns: &[i64], budget: &NumBudget) -> Result<Vec<EvalReport>> {
    if ns.iter().any(|&n| n < 1) {
        return Err(Error::Domain("normalized coefficients are defined for n >= 1".into()));
    }
    let kappa = tw as f64 / 2.0;
    let raw = poincare_coeffs_half(m, tw, kappa / 2.0, ns, budget)?;
    Ok(raw
        .into_iter()
        .zip(ns)
        .map(|(r, &n)| r.scale((n as f64 / m.unsigned_abs() as f64).powf(kappa / 2.0)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    I,
    J,
}

/// Σ_{c ≤ C} K_κ(m,n;c)/(4c)·B_ν(x₀/c), with C = kloosterman_c_max.
pub fn kloosterman_bessel_series(
    tw: i32,
    m: i64,
    n: i64,
    kind: BesselKind,
    order: f64,
    x0: f64,
    budget: &NumBudget,
) -> Result<EvalReport> {
    budget.validate()?;
    let term = |c: u64| -> Vec<Complex64> {
        let x = x0 / c as f64;
        let b = match kind {
            BesselKind::I => bessel_i(order, x),
            BesselKind::J => bessel_j(order, x),
        }
        .unwrap_or(f64::NAN);
        vec![kloosterman_row(tw, m, c).eval(n) * (b / (4.0 * c as f64))]
    };
    let (full, half) = ascending_sum(1, budget.kloosterman_c_max, term);
    let r = reports(full, half, budget).remove(0);
    if !r.value.re.is_finite() {
        return Err(Error::Budget("Bessel evaluation out of range".into()));
    }
    Ok(r)
}

/// Classical Kloosterman sum S(m,n;c).
fn kloosterman_int(m: i64, n: i64, c: u64) -> f64 {
    let c = c as i64;
    let mut s = 0.0;
    for d in 0..c {
        if gcd(d, c) != 1 {
            continue;
        }
        let db = if c == 1 { 0 } else { inv_mod(d, c) };
        let ph = (m.rem_euclid(c) * db + n.rem_euclid(c) * d).rem_euclid(c);
        s += (2.0 * PI * ph as f64 / c as f64).cos();
    }
    s
}

/// n-th coefficient of the classical Poincaré series P_{m,2k} (leading
/// term q^m). For m ≥ 1 this is the cusp form
/// δ_{mn} + 2π(−1)^k (n/m)^{(2k−1)/2} Σ_c S(m,n;c)/c · J_{2k−1}(4π√(mn)/c);
/// for m ≤ −1 it is the form q^m + O(q) orthogonal to cusp forms, with
/// I_{2k−1} in place of J_{2k−1}.
pub fn poincare_coeff_integral(m: i64, two_k: i64, n: i64, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    if two_k < 4 || two_k % 2 != 0 || m == 0 || n < 1 || (m > 0 && two_k < 12) {
        return Err(Error::Domain(format!("need even 2k, m != 0 and n >= 1 (got {two_k}, {m}, {n})")));
    }
    let k = two_k / 2;
    let order = (two_k - 1) as f64;
    let am = m.unsigned_abs() as f64;
    let x0 = 4.0 * PI * (am * n as f64).sqrt();
    let term = |c: u64| -> Vec<Complex64> {
        let x = x0 / c as f64;
        let b = if m > 0 { bessel_j(order, x) } else { bessel_i(order, x) };
        vec![Complex64::new(kloosterman_int(m, n, c) / c as f64 * b.unwrap_or(f64::NAN), 0.0)]
    };
    let (full, half) = ascending_sum(1, budget.kloosterman_c_max, term);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let pre = 2.0 * PI * sign * (n as f64 / am).powf(order / 2.0);
    let delta = if m == n { 1.0 } else { 0.0 };
    let value = delta + pre * full[0].re;
    let err = (pre * (full[0] - half[0]).re).abs();
    if !value.is_finite() {
        return Err(Error::Budget("Bessel evaluation out of range".into()));
    }
    Ok(EvalReport::real(value, err, *budget))
}
