//! Integral-weight level-one forms (E_k, Δ, j, the weakly holomorphic
//! F_m and g_m) and the level-4 generators θ and F.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::dense::{pow_unit, Dense};
use super::{Level, QSeries};
use crate::arith::{bernoulli, divisor_sum, Rational};
use crate::error::{Error, Result};

/// Weights 2k for which M_{2k} has no cusp forms and the exact route works.
pub const CUSPLESS_WEIGHTS: [i64; 5] = [4, 6, 8, 10, 14];

fn check_h(h: i64) -> Result<usize> {
    if h < 0 {
        return Err(Error::Domain(format!("horizon {h} must be nonnegative")));
    }
    Ok(h as usize + 1)
}

/// ∏_{n≥1}(1 − qⁿ) to length `len`, from the pentagonal number theorem.
pub(crate) fn euler_product(len: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    let mut k: i64 = 0;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let p1 = (k * (3 * k - 1) / 2) as usize;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p1 >= len {
            break;
        }
        v[p1] += sign;
        if k > 0 && p2 < len {
            v[p2] += sign;
        }
        k += 1;
    }
    v
}

pub(crate) fn eisenstein_dense(two_k: i64, h: i64) -> Result<Dense> {
    if two_k < 4 || two_k % 2 != 0 {
        return Err(Error::Domain(format!("Eisenstein series needs even weight >= 4, got {two_k}")));
    }
    let len = check_h(h)?;
    let b = bernoulli(two_k as usize);
    // −4k/B_{2k} for weight 2k
    let factor = -Rational::from_integer(BigInt::from(2 * two_k)) / b;
    let den = factor.denom().clone();
    let mut num = Vec::with_capacity(len);
    num.push(den.clone());
    for n in 1..len {
        num.push(factor.numer() * divisor_sum(n as u64, (two_k - 1) as u32));
    }
    Ok(Dense { val: 0, den, num })
}

/// Δ(τ)/q = ∏(1 − qⁿ)²⁴ raised to power `e` (any sign), as integers.
pub(crate) fn delta_over_q_pow(e: i64, len: usize) -> Vec<BigInt> {
    pow_unit(&euler_product(len), 24 * e, len)
}

pub(crate) fn delta_dense(h: i64) -> Result<Dense> {
    let len = check_h(h)?;
    let mut v = vec![BigInt::zero()];
    v.extend(delta_over_q_pow(1, len.saturating_sub(1)));
    v.truncate(len);
    Ok(Dense::from_ints(0, v))
}

pub(crate) fn j_dense(h: i64) -> Result<Dense> {
    if h < -1 {
        return Err(Error::Domain("j needs horizon >= -1".into()));
    }
    let len = (h + 2) as usize;
    let e4 = eisenstein_dense(4, len as i64)?;
    let e4c = e4.mul_to(&e4, len as i64).mul_to(&e4, len as i64);
    let inv = Dense::from_ints(-1, delta_over_q_pow(-1, len));
    Ok(e4c.mul_to(&inv, h))
}

/// Normalized Eisenstein series E_{2k} = 1 − (4k/B_{2k}) Σ σ_{2k−1}(n)qⁿ.
pub fn eisenstein(two_k: i64, horizon: i64) -> Result<QSeries> {
    let d = eisenstein_dense(two_k, horizon)?;
    Ok(QSeries::from_dense(2 * two_k as i32, Level::Sl2z, false, &d))
}

pub fn delta(horizon: i64) -> Result<QSeries> {
    Ok(QSeries::from_dense(24, Level::Sl2z, false, &delta_dense(horizon)?))
}

/// j(τ) = q⁻¹ + 744 + 196884q + …
pub fn j_invariant(horizon: i64) -> Result<QSeries> {
    Ok(QSeries::from_dense(0, Level::Sl2z, false, &j_dense(horizon)?))
}

pub(crate) fn theta_ints(len: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); len];
    let mut n = 0usize;
    while n * n < len {
        v[n * n] += if n == 0 { 1 } else { 2 };
        n += 1;
    }
    v
}

/// F(τ) = Σ_{n odd} σ₁(n)qⁿ divided by q, as integers.
pub(crate) fn level4_w2_over_q(len: usize) -> Vec<BigInt> {
    (0..len)
        .map(|i| {
            let n = i as u64 + 1;
            if n % 2 == 1 {
                divisor_sum(n, 1)
            } else {
                BigInt::zero()
            }
        })
        .collect()
}

/// θ(τ) = Σ_{n∈ℤ} q^{n²}, weight 1/2 on Γ₀(4).
pub fn theta(horizon: i64) -> Result<QSeries> {
    let len = check_h(horizon)?;
    Ok(QSeries::from_dense(1, Level::Gamma04, true, &Dense::from_ints(0, theta_ints(len))))
}

/// F(τ) = Σ_{n odd} σ₁(n)qⁿ, weight 2 on Γ₀(4).
pub fn level4_weight2(horizon: i64) -> Result<QSeries> {
    let len = check_h(horizon)?;
    let mut v = vec![BigInt::zero()];
    v.extend(level4_w2_over_q(len - 1));
    Ok(QSeries::from_dense(4, Level::Gamma04, false, &Dense::from_ints(0, v)))
}

/// Greedy elimination of principal parts against a chain of forms
/// base·j^i with valuation −(i + v₀) and leading coefficient 1.
/// Returns the combination with principal part exactly `target`
/// (ascending exponents), truncated at `h`.
fn reduce_with_j_chain(base: &Dense, target: &[(i64, Rational)], h: i64) -> Result<Dense> {
    let v0 = base.first_nonzero().ok_or_else(|| Error::Domain("zero base".into()))?;
    let n = target.first().map(|(e, _)| -e).unwrap_or(0).max(0);
    let jh = h + n + 2;
    let j = j_dense(jh)?;
    let mut chain = vec![base.clone()];
    let steps = (v0 + n).max(0) as usize;
    for _ in 0..steps {
        let last = chain.last().unwrap();
        let next = last.mul(&j);
        chain.push(next);
    }
    let mut acc = Dense::zero((-n).min(v0), h);
    let tmap: std::collections::BTreeMap<i64, Rational> = target.iter().cloned().collect();
    for e in acc.val..0 {
        let have = acc.coeff(e);
        let want = tmap.get(&e).cloned().unwrap_or_else(Rational::zero);
        let diff = want - have;
        if diff.is_zero() {
            continue;
        }
        if e > v0 {
            return Err(Error::NoSuchForm(format!("exponent {e} lies above the base valuation {v0}")));
        }
        let i = (v0 - e) as usize;
        let el = &chain[i];
        let lead = el.coeff(e);
        acc.axpy(&(diff / lead), el);
    }
    acc.truncate(h);
    acc.normalize();
    Ok(acc)
}

fn check_cuspless(two_k: i64) -> Result<()> {
    if !CUSPLESS_WEIGHTS.contains(&two_k) {
        return Err(Error::Domain(format!(
            "weight {two_k} carries cusp forms; the exact weakly holomorphic route needs 2k in {CUSPLESS_WEIGHTS:?}"
        )));
    }
    Ok(())
}

/// The form of weight 2 − 2k with principal part given by `principal`
/// (pairs (exponent, coefficient), exponents negative) and no other
/// negative powers. For a single q^{-m} this is F_m = q^{-m} + O(1).
pub fn weakly_holo_integral(two_k: i64, principal: &[(i64, Rational)], horizon: i64) -> Result<QSeries> {
    check_cuspless(two_k)?;
    let mut pp: Vec<_> = principal.iter().filter(|(_, c)| !c.is_zero()).cloned().collect();
    pp.sort_by_key(|(e, _)| *e);
    if pp.iter().any(|(e, _)| *e >= 0) {
        return Err(Error::Domain("principal part exponents must be negative".into()));
    }
    let n = pp.first().map(|(e, _)| -e).unwrap_or(0);
    // E_{14−2k}/Δ = q⁻¹ + …
    let bh = horizon + n + 2;
    let inv_delta = Dense::from_ints(-1, delta_over_q_pow(-1, (bh + 2) as usize));
    let base = if two_k == 14 {
        inv_delta
    } else {
        eisenstein_dense(14 - two_k, bh + 1)?.mul_to(&inv_delta, bh)
    };
    let d = reduce_with_j_chain(&base, &pp, horizon)?;
    Ok(QSeries::from_dense(2 * (2 - two_k) as i32, Level::Sl2z, false, &d))
}

/// F_m of weight 2 − 2k: the unique weakly holomorphic form q^{-m} + O(1).
pub fn weakly_holo_integral_basis(two_k: i64, m: i64, horizon: i64) -> Result<QSeries> {
    if m <= 0 {
        return Err(Error::Domain(format!("m must be positive, got {m}")));
    }
    weakly_holo_integral(two_k, &[(-m, Rational::one())], horizon)
}

/// g_m of weight 2k: the form q^{-m} + O(q) (cusp-form free weights only).
pub fn g_m(two_k: i64, m: i64, horizon: i64) -> Result<QSeries> {
    check_cuspless(two_k)?;
    if m <= 0 {
        return Err(Error::Domain(format!("m must be positive, got {m}")));
    }
    let e = eisenstein_dense(two_k, horizon + m + 2)?;
    // chain E·j^i has valuation −i; we also kill the constant with E itself
    let mut d = reduce_with_j_chain(&e, &[(-m, Rational::one())], horizon)?;
    let c0 = d.coeff(0);
    if !c0.is_zero() {
        d.axpy(&-c0, &e);
        d.truncate(horizon);
    }
    Ok(QSeries::from_dense(4 * two_k as i32, Level::Sl2z, false, &d))
}
