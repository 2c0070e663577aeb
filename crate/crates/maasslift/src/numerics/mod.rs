//! Floating-point side of the library: special functions, half-integral
//! weight Kloosterman sums, Poincaré coefficient formulas, Niebur series
//! evaluation and Petersson norms.
//!
//! Every truncated sum reports an error estimate obtained by comparing the
//! full truncation with the one at half the budget.

mod kloosterman;
mod niebur;
mod petersson;
mod poincare;
pub mod special;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use kloosterman::{kloosterman_half, kloosterman_row, KloostermanRow};
pub use niebur::{niebur_eval, niebur_p0, reduce_to_fundamental};
pub use petersson::petersson_norm_sq;
pub use poincare::{
    kloosterman_bessel_series, poincare_coeff_half, poincare_coeff_integral, poincare_coeffs_half,
    poincare_normalized_coeffs, whittaker_special, BesselKind, HarmonicBranch,
};
pub use special::{bessel_i, bessel_j, gamma, inc_gamma};

use crate::error::{Error, Result};

/// Truncation parameters attached to every floating computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumBudget {
    pub kloosterman_c_max: u64,
    pub coset_c_max: u64,
    pub series_terms: u64,
    pub quad_depth: u64,
    /// absolute tolerance
    pub tol: f64,
}

impl Default for NumBudget {
    fn default() -> Self {
        NumBudget { kloosterman_c_max: 2000, coset_c_max: 48, series_terms: 20, quad_depth: 24, tol: 1e-6 }
    }
}

impl NumBudget {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kloosterman_c_max > 0
            && self.coset_c_max > 0
            && self.series_terms > 0
            && self.quad_depth > 0
            && self.tol > 0.0
            && self.tol.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid budget {self:?}")))
        }
    }

    /// Every count doubled; used by the doubling test.
    pub fn doubled(&self) -> Self {
        NumBudget {
            kloosterman_c_max: self.kloosterman_c_max * 2,
            coset_c_max: self.coset_c_max * 2,
            series_terms: self.series_terms * 2,
            quad_depth: self.quad_depth * 2,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub value: Complex64,
    pub est_error: f64,
    pub budget_used: NumBudget,
}

impl EvalReport {
    pub fn new(value: Complex64, est_error: f64, budget_used: NumBudget) -> Self {
        EvalReport { value, est_error: est_error.abs(), budget_used }
    }

    pub fn real(value: f64, est_error: f64, budget_used: NumBudget) -> Self {
        Self::new(Complex64::new(value, 0.0), est_error, budget_used)
    }

    pub fn converged(&self) -> bool {
        self.est_error <= self.budget_used.tol
    }

    pub fn scale(&self, c: f64) -> Self {
        EvalReport { value: self.value * c, est_error: self.est_error * c.abs(), budget_used: self.budget_used }
    }

    /// Sum of two reports; errors add.
    pub fn plus(&self, other: &EvalReport) -> Self {
        EvalReport {
            value: self.value + other.value,
            est_error: self.est_error + other.est_error,
            budget_used: self.budget_used,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "value_re": self.value.re,
            "value_im": self.value.im,
            "est_error": self.est_error,
            "budget": self.budget_used,
        })
    }
}
