//! Point evaluation of the Niebur Poincaré series
//! F_m(s;τ) = Σ_{Γ_∞\Γ} φ(Im γτ) e(m Re γτ), φ(y) = 2π|m|^{s−1/2} y^{1/2} I_{s−1/2}(2π|m|y).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::special::{bessel_i, gamma, gauss_legendre};
use super::{EvalReport, NumBudget};
use crate::arith::{gcd, inv_mod};
use crate::error::{Error, Result};

/// Moves τ into the standard fundamental domain. Returns the image and
/// the matrix γ with γτ equal to it.
pub fn reduce_to_fundamental(tau: Complex64) -> Result<(Complex64, [[i64; 2]; 2])> {
    if tau.im <= 0.0 || !tau.re.is_finite() {
        return Err(Error::Domain(format!("{tau} is not in the upper half-plane")));
    }
    let mut z = tau;
    let mut g = [[1i64, 0], [0, 1]];
    for _ in 0..10_000 {
        let n = (z.re + 0.5).floor();
        if n != 0.0 {
            z.re -= n;
            let n = n as i64;
            g = [[g[0][0] - n * g[1][0], g[0][1] - n * g[1][1]], g[1]];
        }
        if z.norm_sqr() < 1.0 - 1e-15 {
            z = -z.inv();
            g = [[-g[1][0], -g[1][1]], g[0]];
        } else {
            return Ok((z, g));
        }
    }
    Err(Error::Domain(format!("reduction of {tau} did not terminate")))
}

struct Seed {
    pre: f64,
    order: f64,
    freq: f64,
}

impl Seed {
    fn new(m: i64, s: f64) -> Self {
        let am = m.unsigned_abs() as f64;
        Seed { pre: 2.0 * PI * am.powf(s - 0.5), order: s - 0.5, freq: 2.0 * PI * am }
    }

    fn phi(&self, y: f64) -> f64 {
        self.pre * y.sqrt() * bessel_i(self.order, self.freq * y).unwrap_or(f64::NAN)
    }
}

/// F_m(s;τ) with cosets c ≤ coset_c_max, |t| ≤ series_terms translates
/// summed directly and the remaining translates integrated.
pub fn niebur_eval(m: i64, s: f64, tau: Complex64, budget: &NumBudget) -> Result<EvalReport> {
    budget.validate()?;
    if m == 0 {
        return Err(Error::Domain("Niebur series needs m != 0".into()));
    }
    if s <= 1.0 {
        return Err(Error::Domain(format!("Niebur series needs s > 1, got {s}")));
    }
    let (z, _) = reduce_to_fundamental(tau)?;
    let (x, y) = (z.re, z.im);
    let seed = Seed::new(m, s);
    let mf = m as f64;
    let big_t = budget.series_terms as i64;
    let a = big_t as f64 + 0.5;
    let gl = gauss_legendre(budget.quad_depth as usize);
    let c_max = budget.coset_c_max;

    let mut total = seed.phi(y) * Complex64::from_polar(1.0, 2.0 * PI * mf * x);
    let mut half = total;
    for c in 1..=c_max {
        let cf = c as f64;
        let g = |u: f64| -> Complex64 {
            let den = cf * cf * (u * u + y * y);
            seed.phi(y / den) * Complex64::from_polar(1.0, -2.0 * PI * mf * u / den)
        };
        let mut row = Complex64::new(0.0, 0.0);
        for r in 0..c as i64 {
            if gcd(r, c as i64) != 1 {
                continue;
            }
            let rb = if c == 1 { 0 } else { inv_mod(r, c as i64) };
            let u0 = x + r as f64 / cf;
            let mut acc = Complex64::new(0.0, 0.0);
            for t in -big_t..=big_t {
                acc += g(u0 + t as f64);
            }
            // t = a/w on both sides, w ∈ (0, 1]
            for (node, wt) in gl.0.iter().zip(&gl.1) {
                let w = 0.5 * (node + 1.0);
                let jac = 0.5 * wt * a / (w * w);
                acc += (g(u0 + a / w) + g(u0 - a / w)) * jac;
            }
            row += acc * Complex64::from_polar(1.0, 2.0 * PI * mf * rb as f64 / cf);
        }
        total += row;
        if c == c_max / 2 {
            half = total;
        }
    }
    if !total.re.is_finite() {
        return Err(Error::Budget("Niebur evaluation overflowed".into()));
    }
    let est = if c_max >= 2 { (total - half).norm() } else { total.norm() };
    Ok(EvalReport::new(total, est, *budget))
}

/// P_{m,0}(s;τ) = Γ(s)^{−1}|m|^{1−s} F_m(s;τ).
pub fn niebur_p0(m: i64, s: f64, tau: Complex64, budget: &NumBudget) -> Result<EvalReport> {
    let f = niebur_eval(m, s, tau, budget)?;
    Ok(f.scale((m.unsigned_abs() as f64).powf(1.0 - s) / gamma(s)))
}
