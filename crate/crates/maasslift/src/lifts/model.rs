//! Harmonic weak Maass forms of weight 2 − 2k on SL₂(ℤ), stored as an exact
//! holomorphic part plus an exact cusp form carrying the shadow.

use num_traits::One;

use crate::arith::{bernoulli, divisor_sum, rint, to_f64, Rational};
use crate::error::{Error, Result};
use crate::numerics::{gamma, petersson_norm_sq, EvalReport, NumBudget};
use crate::qseries::{eisenstein, weakly_holo_integral_basis, Level, QSeries, CUSPLESS_WEIGHTS};

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicModel {
    /// M⁺: principal part, constant c⁺(0) and whatever positive
    /// coefficients are known (up to its horizon).
    pub holo_part: QSeries,
    /// Exact cusp form of weight 2k; ξ(M) = shadow_scale · shadow.
    pub shadow: QSeries,
    pub shadow_scale: f64,
    /// error carried by shadow_scale when it came out of a quadrature
    pub shadow_scale_err: f64,
    pub k: i64,
}

impl HarmonicModel {
    pub fn new(holo_part: QSeries, shadow: QSeries, shadow_scale: f64, k: i64) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        let tw = 2 * (2 - 2 * k) as i32;
        if holo_part.twice_weight() != tw || holo_part.level() != Level::Sl2z {
            return Err(Error::Incompatible(format!(
                "holomorphic part has weight {}/2, expected {tw}/2 on SL2(Z)",
                holo_part.twice_weight()
            )));
        }
        if shadow.twice_weight() != 4 * k as i32 || shadow.level() != Level::Sl2z {
            return Err(Error::Incompatible(format!("shadow must have weight {}", 2 * k)));
        }
        if shadow.valuation().is_some_and(|v| v < 1) {
            return Err(Error::Domain("shadow must be a cusp form".into()));
        }
        Ok(HarmonicModel { holo_part, shadow, shadow_scale, shadow_scale_err: 0.0, k })
    }

    pub fn weakly_holomorphic(holo_part: QSeries, k: i64) -> Result<Self> {
        let shadow = QSeries::zero(4 * k as i32, Level::Sl2z, false, holo_part.horizon().max(1));
        Self::new(holo_part, shadow, 1.0, k)
    }

    /// F_{m,2−2k} = q^{−m} + O(1) in a weight with S_{2k} = 0.
    pub fn basis(k: i64, m: i64, horizon: i64) -> Result<Self> {
        Self::weakly_holomorphic(weakly_holo_integral_basis(2 * k, m, horizon)?, k)
    }

    /// F_{1,2−2k} when S_{2k} is one-dimensional. Only the principal part and
    /// c⁺(0) of the holomorphic part are known; the shadow is f/‖f‖² for the
    /// normalized eigenform f, with ‖f‖² from the Petersson quadrature.
    pub fn basis_one_cusp(k: i64, budget: &NumBudget) -> Result<Self> {
        let two_k = 2 * k;
        if CUSPLESS_WEIGHTS.contains(&two_k) {
            return Self::basis(k, 1, 0);
        }
        let f = one_dim_eigenform(two_k, 40)?;
        let norm = petersson_norm_sq(&f, &NumBudget { tol: budget.tol.min(1e-12), ..*budget })?;
        let n = norm.value.re;
        let holo = QSeries::from_coeffs(
            2 * (2 - two_k) as i32,
            Level::Sl2z,
            false,
            0,
            [(-1, Rational::one()), (0, constant_of_basis(k, 1))],
        )?;
        let mut out = Self::new(holo, f, 1.0 / n, k)?;
        out.shadow_scale_err = norm.est_error / (n * n);
        Ok(out)
    }

    pub fn twice_weight(&self) -> i32 {
        2 * (2 - 2 * self.k) as i32
    }

    pub fn is_weakly_holomorphic(&self) -> bool {
        self.shadow.is_zero() || self.shadow_scale == 0.0
    }

    /// c⁺(n), provided n is within the holomorphic horizon.
    pub fn c_plus(&self, n: i64) -> Result<Rational> {
        self.holo_part.coeff(n)
    }

    /// Pairs (m, c⁺(−m)) for m > 0.
    pub fn principal_terms(&self) -> Vec<(i64, Rational)> {
        self.holo_part.terms().filter(|(e, _)| **e < 0).map(|(e, c)| (-e, c.clone())).collect()
    }

    /// c⁻(−n) = Γ(1−κ) a_ξ(n) / (4πn)^{1−κ} with κ = 2 − 2k.
    pub fn c_minus(&self, n: i64) -> Result<f64> {
        if n <= 0 {
            return Err(Error::Domain(format!("c⁻(−n) needs n > 0, got {n}")));
        }
        let a = to_f64(&self.shadow.coeff(n)?) * self.shadow_scale;
        let e = (2 * self.k - 1) as i32;
        Ok(gamma(e as f64) * a / (4.0 * std::f64::consts::PI * n as f64).powi(e))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HarmonicModel { holo_part: self.holo_part.scale(c), shadow: self.shadow.scale(c), ..self.clone() }
    }

    /// Sum of two models; shadows must share their scale.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::Incompatible("models of different weight".into()));
        }
        let holo_part = self.holo_part.add(&other.holo_part)?;
        let (shadow, scale) = if other.is_weakly_holomorphic() {
            (self.shadow.clone(), self.shadow_scale)
        } else if self.is_weakly_holomorphic() {
            (other.shadow.clone(), other.shadow_scale)
        } else if self.shadow_scale == other.shadow_scale {
            (self.shadow.add(&other.shadow)?, self.shadow_scale)
        } else {
            return Err(Error::Incompatible("shadows carry different scales".into()));
        };
        let mut out = Self::new(holo_part, shadow, scale, self.k)?;
        out.shadow_scale_err = self.shadow_scale_err + other.shadow_scale_err;
        Ok(out)
    }

    /// ‖ξ(M)‖-style scale factor as a report, for error bookkeeping.
    pub fn scale_report(&self, budget: &NumBudget) -> EvalReport {
        EvalReport::real(self.shadow_scale, self.shadow_scale_err, *budget)
    }
}

/// c⁺(0) of F_{m,2−2k}: 4k σ_{2k−1}(m) / B_{2k}, forced by {E_{2k}, F_m} = 0.
pub fn constant_of_basis(k: i64, m: i64) -> Rational {
    let s = Rational::from_integer(divisor_sum(m as u64, (2 * k - 1) as u32));
    rint(4 * k) * s / bernoulli((2 * k) as usize)
}

/// Δ·E_{2k−12}, the normalized eigenform when dim S_{2k} = 1.
pub fn one_dim_eigenform(two_k: i64, horizon: i64) -> Result<QSeries> {
    let d = crate::qseries::delta(horizon)?;
    match two_k {
        12 => Ok(d),
        16 | 18 | 20 | 22 | 26 => d.mul(&eisenstein(two_k - 12, horizon)?),
        _ => Err(Error::Domain(format!("S_{two_k} is not one-dimensional"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn constants() {
        assert_eq!(constant_of_basis(2, 1), rint(-240));
        assert_eq!(constant_of_basis(3, 1), rint(504));
        assert_eq!(constant_of_basis(6, 1), rat(-65520, 691));
        let f = HarmonicModel::basis(2, 1, 5).unwrap();
        assert_eq!(f.c_plus(0).unwrap(), rint(-240));
        assert!(f.is_weakly_holomorphic());
    }

    #[test]
    fn shadow_coefficients() {
        let b = NumBudget::default();
        let m = HarmonicModel::basis_one_cusp(6, &b).unwrap();
        let norm = 1.035_362_056_804_32e-6;
        assert!((m.shadow_scale * norm - 1.0).abs() < 1e-9);
        // c⁻(−1) = 10!/((4π)^{11} ‖Δ‖²)
        let want = gamma(11.0) / (4.0 * std::f64::consts::PI).powi(11) / norm;
        assert!((m.c_minus(1).unwrap() / want - 1.0).abs() < 1e-9);
    }
}
