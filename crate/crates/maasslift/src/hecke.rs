//! Hecke operators on q-expansions: T(m) in integral weight and T(m²) in
//! half-integral weight, both renormalized by m^{α} resp. m^{2α} with
//! α = 1 − κ for negative weight κ and α = 0 otherwise.

use num_traits::Zero;

use crate::arith::{factorize, is_prime, rpow, Rational};
use crate::error::{Error, Result};
use crate::qseries::{plus_allowed, QSeries};

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// 2α for a series of weight tw/2.
fn two_alpha(tw: i32) -> i64 {
    if tw < 0 {
        2 - tw as i64
    } else {
        0
    }
}

fn integral_weight(f: &QSeries) -> Result<i64> {
    let tw = f.twice_weight();
    if tw % 2 != 0 {
        return Err(Error::Domain(format!("T(m) needs integral weight, got {tw}/2")));
    }
    Ok(tw as i64 / 2)
}

fn half_lambda(f: &QSeries) -> Result<i64> {
    let tw = f.twice_weight();
    if tw % 2 == 0 {
        return Err(Error::Domain(format!("T(p^2) needs half-integral weight, got {tw}/2")));
    }
    Ok((tw as i64 - 1).div_euclid(2))
}

/// Range of output exponents for an operator that reads c(n·s) and
/// c(n/s), given the input valuation and horizon.
fn out_range(f: &QSeries, s: i64) -> (i64, i64) {
    let h = f.horizon().div_euclid(s);
    let v = f.valuation().unwrap_or(0).min(0);
    (v * s, h)
}

/// f | T(p) in weight κ: p^α(c(np) + p^{κ−1}c(n/p)).
pub fn hecke_integral(f: &QSeries, p: u64) -> Result<QSeries> {
    check_prime(p)?;
    hecke_composite_integral(f, p)
}

/// f | T(m) in weight κ, m ≥ 1: m^α Σ_{d | (m,n)} d^{κ−1} c(mn/d²).
fn hecke_composite_integral(f: &QSeries, m: u64) -> Result<QSeries> {
    let kappa = integral_weight(f)?;
    let m = m as i64;
    if m < 1 {
        return Err(Error::Domain("T(m) needs m >= 1".into()));
    }
    let alpha = if kappa < 0 { 1 - kappa } else { 0 };
    let scale = rpow(m, alpha);
    let (lo, hi) = out_range(f, m);
    let divs = crate::arith::divisors(m as u64);
    let mut out = Vec::new();
    for n in lo..=hi {
        let mut s = Rational::zero();
        for &d in &divs {
            let d = d as i64;
            if n % d != 0 {
                continue;
            }
            let e = m * n / (d * d);
            let c = f.coeff(e)?;
            if !c.is_zero() {
                s += c * rpow(d, kappa - 1);
            }
        }
        if !s.is_zero() {
            out.push((n, s * &scale));
        }
    }
    QSeries::from_coeffs(f.twice_weight(), f.level(), f.is_plus(), hi, out)
}

/// f | T(p²) in weight λ + 1/2:
/// p^{2α}(c(np²) + ((−1)^λ n / p)p^{λ−1}c(n) + p^{2λ−1}c(n/p²)).
pub fn hecke_half(f: &QSeries, p: u64) -> Result<QSeries> {
    check_prime(p)?;
    let scale = rpow(p as i64, two_alpha(f.twice_weight()));
    Ok(hecke_half_classical(f, p)?.scale(&scale))
}

fn hecke_half_classical(f: &QSeries, p: u64) -> Result<QSeries> {
    let lambda = half_lambda(f)?;
    let p = p as i64;
    let p2 = p * p;
    let sgn = if lambda.rem_euclid(2) == 0 { 1 } else { -1 };
    let mid = rpow(p, lambda - 1);
    let low = rpow(p, 2 * lambda - 1);
    let (lo, hi) = out_range(f, p2);
    // at p = 2 the operator is only defined on the plus space, where it
    // includes the projection back onto plus support
    if p == 2 && !f.check_plus() {
        return Err(Error::Domain("T(4) needs a plus-space series".into()));
    }
    let mut out = Vec::new();
    for n in lo..=hi {
        if p == 2 && !plus_allowed(f.twice_weight(), n) {
            continue;
        }
        let mut s = f.coeff(n * p2)?;
        let cn = f.coeff(n)?;
        if !cn.is_zero() {
            let chi = crate::arith::kronecker(sgn * n, p);
            if chi != 0 {
                s += cn * &mid * Rational::from_integer(chi.into());
            }
        }
        if n % p2 == 0 {
            let c = f.coeff(n / p2)?;
            if !c.is_zero() {
                s += c * &low;
            }
        }
        if !s.is_zero() {
            out.push((n, s));
        }
    }
    QSeries::from_coeffs(f.twice_weight(), f.level(), f.is_plus(), hi, out)
}

/// T(m) in integral weight, T(m²) in half-integral weight, with the
/// renormalization m^α resp. m^{2α}.
pub fn hecke_composite(f: &QSeries, m: u64) -> Result<QSeries> {
    if m == 0 {
        return Err(Error::Domain("T(0) is undefined".into()));
    }
    if f.twice_weight() % 2 == 0 {
        return hecke_composite_integral(f, m);
    }
    let lambda = half_lambda(f)?;
    let mut g = f.clone();
    for (p, r) in factorize(m) {
        // S_{j+1} = S_j | T(p²) − p^{2λ−1} S_{j−1}
        let mut prev = g.clone();
        let mut cur = hecke_half_classical(&g, p)?;
        for _ in 1..r {
            let next = hecke_half_classical(&cur, p)?.sub(&prev.scale(&rpow(p as i64, 2 * lambda - 1)))?;
            prev = cur;
            cur = next;
        }
        g = cur;
    }
    Ok(g.scale(&rpow(m as i64, two_alpha(f.twice_weight()))))
}

/// Exponent horizon an input needs so that f | T(m) (or T(m²)) reaches `h`.
pub fn required_horizon(twice_weight: i32, m: u64, h: i64) -> i64 {
    let m = m as i64;
    let s = if twice_weight % 2 == 0 { m } else { m * m };
    h * s
}
