//! ‖f‖² = ∫_F |f(τ)|² y^{2k−2} dx dy over the standard fundamental domain.

use std::f64::consts::PI;

use super::special::gauss_legendre;
use super::{EvalReport, NumBudget};
use crate::arith::to_f64;
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// |f(x+iy)|² from the truncated expansion.
fn abs_sq(coeffs: &[(i64, f64)], x: f64, y: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &(n, a) in coeffs {
        let r = a * (-2.0 * PI * n as f64 * y).exp();
        let (s, c) = (2.0 * PI * n as f64 * x).sin_cos();
        re += r * c;
        im += r * s;
    }
    re * re + im * im
}

fn integrate(coeffs: &[(i64, f64)], wexp: i32, y_top: f64, nodes: usize) -> f64 {
    let gl = gauss_legendre(nodes);
    let mut total = 0.0;
    // x ∈ [0, 1/2] in two panels; |f|² is even in x for real coefficients
    for (x0, x1) in [(0.0, 0.25), (0.25, 0.5)] {
        let (xm, xh) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
        for (xn, xw) in gl.0.iter().zip(&gl.1) {
            let x = xm + xh * xn;
            let mut lo = (1.0 - x * x).sqrt();
            let mut inner = 0.0;
            while lo < y_top {
                let hi = (lo + 0.75).min(y_top);
                let (ym, yh) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (yn, yw) in gl.0.iter().zip(&gl.1) {
                    let y = ym + yh * yn;
                    inner += yw * yh * abs_sq(coeffs, x, y) * y.powi(wexp);
                }
                lo = hi;
            }
            total += xw * xh * inner;
        }
    }
    2.0 * total
}

/// Petersson norm of a level-one cusp form given by its exact expansion.
pub fn petersson_norm_sq(f: &QSeries, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    let tw = f.twice_weight();
    if tw % 4 != 0 || tw < 24 {
        return Err(Error::Domain(format!("expected a cusp form of even weight >= 12, got weight {tw}/2")));
    }
    if f.valuation().is_some_and(|v| v < 1) {
        return Err(Error::Domain("input is not cuspidal".into()));
    }
    let wexp = tw / 2 - 2;
    let coeffs: Vec<(i64, f64)> = f.terms().map(|(&n, a)| (n, to_f64(a))).collect();
    let amax = coeffs.iter().map(|(n, a)| a.abs() / (*n as f64).powf(tw as f64 / 4.0)).fold(0.0, f64::max);
    // truncation: Σ_{n>N} |a_n| e^{−2πny} at y = √3/2, with |a_n| ≤ amax·n^{k}
    let n_top = f.horizon() as f64;
    let ymin = 3f64.sqrt() / 2.0;
    let trunc = amax * (n_top + 1.0).powf(tw as f64 / 4.0) * (-2.0 * PI * (n_top + 1.0) * ymin).exp()
        / (1.0 - (-2.0 * PI * ymin).exp());
    let fmax = coeffs.iter().map(|(_, a)| a.abs()).sum::<f64>();
    if 2.0 * fmax * trunc > budget.tol * 1e-3 {
        return Err(Error::Horizon { needed: f.horizon() + 10, have: f.horizon() });
    }
    // above y_top the integrand is below 1e-30 of its size at the bottom
    let a1 = coeffs.first().map(|(_, a)| a.abs()).unwrap_or(0.0);
    if a1 == 0.0 {
        return Ok(EvalReport::real(0.0, 0.0, *budget));
    }
    let mut y_top = 2.0;
    while (-4.0 * PI * y_top).exp() * y_top.powi(wexp) > 1e-30 * (-4.0 * PI).exp() {
        y_top += 0.5;
    }
    let nodes = budget.quad_depth as usize;
    let full = integrate(&coeffs, wexp, y_top, nodes);
    let half = integrate(&coeffs, wexp, y_top, (nodes / 2).max(2));
    Ok(EvalReport::real(full, (full - half).abs(), *budget))
}
