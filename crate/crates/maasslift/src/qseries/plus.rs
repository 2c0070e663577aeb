//! Kohnen plus-space bases on Γ₀(4): holomorphic bases from θ/F monomials
//! and weakly holomorphic forms with prescribed principal part.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::Mutex;

use super::dense::{pow_unit, Dense};
use super::forms::{euler_product, j_dense, level4_w2_over_q, theta_ints};
use super::linalg::rref_tracked;
use super::{plus_allowed, Level, PrincipalPart, QSeries};
use crate::arith::{divisor_sum, divisors, fundamental_part, kronecker, l_value_neg, moebius, zeta_neg, Rational};
use crate::error::{Error, Result};

/// Horizon beyond which the level-4 linear algebra is trusted:
/// ⌈weight/2⌉ + |most negative exponent| + 8.
pub fn sturm_horizon(twice_weight: i32, neg: i64) -> i64 {
    (twice_weight as i64).max(0).div_euclid(4) + 1 + neg.abs() + 8
}

fn combine(rows: &[Dense], comb: &[Rational], val: i64, h: i64) -> Dense {
    let mut acc = Dense::zero(val, h);
    for (c, r) in comb.iter().zip(rows) {
        acc.axpy(c, r);
    }
    acc.normalize();
    acc
}

/// Reduced echelon form of `rows`, decided on the exponent window
/// lo..=hi and applied to the full rows. Rows vanishing on the window
/// are dropped.
fn echelon(rows: &[Dense], lo: i64, hi: i64, h: i64) -> Vec<(i64, Dense)> {
    let mat: Vec<Vec<Rational>> = rows.iter().map(|r| (lo..=hi).map(|e| r.coeff(e)).collect()).collect();
    let (piv, _) = rref_tracked(&mat, (hi - lo + 1) as usize);
    let val = rows.iter().map(|r| r.val).min().unwrap_or(lo);
    piv.into_iter().map(|(c, _, t)| (lo + c as i64, combine(rows, &t, val, h))).collect()
}

/// Echelon basis (pivot, series) of the holomorphic plus space of weight
/// tw/2, known to horizon `h`.
fn holo_plus_dense(tw: i32, h: i64) -> Result<Vec<(i64, Dense)>> {
    if tw % 2 == 0 {
        return Err(Error::Domain(format!("plus space needs odd twice_weight, got {tw}")));
    }
    if tw < 1 {
        return Ok(Vec::new());
    }
    let s = sturm_horizon(tw, 0);
    if h < s {
        return Err(Error::Horizon { needed: s, have: h });
    }
    let k = (tw as i64 - 1) / 2;
    let len = (h + 1) as usize;
    let th = theta_ints(len);
    let fq = level4_w2_over_q(len);
    let mut mons = Vec::new();
    let mut j = 0i64;
    while 2 * k + 1 - 4 * j >= 0 {
        let a = Dense::from_ints(0, pow_unit(&th, 2 * k + 1 - 4 * j, len));
        let b = Dense::from_ints(j, pow_unit(&fq, j, len));
        mons.push(b.mul_to(&a, h));
        j += 1;
    }
    let bad: Vec<i64> = (0..=s).filter(|&e| !plus_allowed(tw, e)).collect();
    let mat: Vec<Vec<Rational>> = mons.iter().map(|m| bad.iter().map(|&e| m.coeff(e)).collect()).collect();
    let (_, kernel) = rref_tracked(&mat, bad.len());
    let basis: Vec<Dense> = kernel.iter().map(|t| combine(&mons, t, 0, h)).collect();
    // certify against the full horizon, not just the Sturm window
    for b in &basis {
        for e in 0..=h {
            if !plus_allowed(tw, e) && !b.num_at(e).map_or(true, |x| x.is_zero()) {
                return Err(Error::Domain(format!("plus-space certification failed at exponent {e}")));
            }
        }
    }
    Ok(echelon(&basis, 0, s, h))
}

/// Basis of the holomorphic Kohnen plus space M⁺_{tw/2} in echelon form.
pub fn plus_space_basis(twice_weight: i32, horizon: i64) -> Result<Vec<QSeries>> {
    Ok(holo_plus_dense(twice_weight, horizon)?
        .iter()
        .map(|(_, d)| QSeries::from_dense(twice_weight, Level::Gamma04, true, d))
        .collect())
}

/// Cohen's Eisenstein series of weight k + 1/2 with constant ζ(1 − 2k).
pub fn cohen_eisenstein(k: i64, horizon: i64) -> Result<QSeries> {
    if k < 2 {
        return Err(Error::Domain(format!("Cohen series needs k >= 2, got {k}")));
    }
    let tw = (2 * k + 1) as i32;
    let mut coeffs = vec![(0i64, zeta_neg((2 * k) as usize))];
    for n in 1..=horizon {
        if plus_allowed(tw, n) {
            coeffs.push((n, cohen_coeff(k, n)?));
        }
    }
    QSeries::from_coeffs(tw, Level::Gamma04, true, horizon, coeffs)
}

/// H(k, n) for n > 0 in the plus support: L_{D₀}(1−k) Σ_{r|f} μ(r)χ_{D₀}(r) r^{k−1} σ_{2k−1}(f/r)
/// where (−1)^k n = D₀f².
fn cohen_coeff(k: i64, n: i64) -> Result<Rational> {
    let sgn = if k % 2 == 0 { 1 } else { -1 };
    let (d0, f) = fundamental_part(sgn * n)?;
    let mut s = BigInt::zero();
    for r in divisors(f as u64) {
        let mu = moebius(r);
        let chi = kronecker(d0, r as i64);
        if mu * chi == 0 {
            continue;
        }
        s += BigInt::from(mu * chi) * BigInt::from(r).pow((k - 1) as u32) * divisor_sum(f as u64 / r, (2 * k - 1) as u32);
    }
    Ok(l_value_neg(d0, k as usize)? * Rational::from_integer(s))
}

/// Constant term of the weight 3/2 − k plus form with principal part
/// `principal`, for k with no cusp forms of weight 2k. Its pairing with
/// Cohen's series vanishes, so c(0)ζ(1−2k) = −Σ c(−n)H(k,n); this avoids
/// building the form when the principal part is deep.
pub fn weakly_holo_plus_constant(twice_weight: i32, principal: &PrincipalPart) -> Result<Rational> {
    let k = (3 - twice_weight as i64) / 2;
    if twice_weight % 2 == 0 || !matches!(k, 2..=5 | 7) {
        return Err(Error::Domain(format!("weight {twice_weight}/2 is not 3/2 - k with S_2k = 0")));
    }
    let mut s = Rational::zero();
    for (e, c) in &principal.0 {
        if !plus_allowed(twice_weight, *e) {
            return Err(Error::Domain(format!("exponent {e} violates the plus-space condition")));
        }
        s += c * cohen_coeff(k, -e)?;
    }
    Ok(-s / zeta_neg((2 * k) as usize))
}

// ---------------------------------------------------------------------------
// weakly holomorphic forms
// ---------------------------------------------------------------------------

struct Seeds {
    horizon: i64,
    /// reduced forms q^p + (higher) with negative pivot p
    neg: Vec<(i64, Dense)>,
    /// holomorphic echelon basis of the same weight
    holo: Vec<(i64, Dense)>,
}

static SEEDS: Lazy<Mutex<HashMap<i32, Arc<Seeds>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Δ(4τ)^{−J} known to horizon h.
fn delta4_inv(jj: i64, h: i64) -> Dense {
    let l4 = (h.max(0) / 4 + jj + 2) as usize;
    let p = pow_unit(&euler_product(l4), -24 * jj, l4);
    let val = -4 * jj;
    let len = (h - val + 1) as usize;
    let mut num = vec![BigInt::zero(); len];
    for (i, x) in p.into_iter().enumerate() {
        if 4 * i < len {
            num[4 * i] = x;
        }
    }
    Dense::from_ints(val, num)
}

fn build_seeds(tw: i32, hs: i64) -> Result<Seeds> {
    let holo = holo_plus_dense(tw, hs.max(sturm_horizon(tw, 0)))?;
    let residues: Vec<i64> = (0..4).filter(|&r| plus_allowed(tw, r)).collect();
    for jj in 1..=6i64 {
        let w = tw + 24 * jj as i32;
        let hb = hs + 4 * jj;
        let hb_basis = holo_plus_dense(w, hb.max(sturm_horizon(w, 0)))?;
        let inv = delta4_inv(jj, hs);
        let rows: Vec<Dense> = hb_basis.iter().map(|(_, b)| inv.mul_to(b, hs)).collect();
        let lo = -4 * jj;
        let hi = sturm_horizon(w, 0);
        let ech = echelon(&rows, lo, hi.min(hs), hs);
        let neg: Vec<(i64, Dense)> = ech.into_iter().filter(|(p, _)| *p < 0).collect();
        if residues.iter().all(|r| neg.iter().any(|(p, _)| p.rem_euclid(4) == *r)) {
            return Ok(Seeds { horizon: hs, neg, holo });
        }
    }
    Err(Error::NoSuchForm(format!("no seed forms found in weight {tw}/2")))
}

fn seeds(tw: i32, hs: i64) -> Result<Arc<Seeds>> {
    if let Some(s) = SEEDS.lock().get(&tw) {
        if s.horizon >= hs {
            return Ok(s.clone());
        }
    }
    let s = Arc::new(build_seeds(tw, hs)?);
    SEEDS.lock().insert(tw, s.clone());
    Ok(s)
}

/// Weakly holomorphic plus-space form with the given principal part and
/// no other negative powers, known to horizon h. For positive weight the
/// constant term and the coefficients at cusp-form pivots are zeroed; the
/// cusp-form basis is returned alongside so callers see the ambiguity.
pub fn weakly_holo_plus_affine(
    twice_weight: i32,
    principal: &PrincipalPart,
    horizon: i64,
) -> Result<(QSeries, Vec<QSeries>)> {
    let tw = twice_weight;
    if tw % 2 == 0 {
        return Err(Error::Domain(format!("plus space needs odd twice_weight, got {tw}")));
    }
    for &e in principal.0.keys() {
        if !plus_allowed(tw, e) {
            return Err(Error::Domain(format!("exponent {e} violates the plus-space condition in weight {tw}/2")));
        }
    }
    let n = principal.min_exponent().map_or(0, |e| -e);
    let hs = horizon + n + 8;
    let sd = seeds(tw, hs)?;
    let trunc = |d: &Dense| {
        let mut d = d.clone();
        d.truncate(hs);
        d
    };
    let hj = hs / 4 + 2;
    let j = j_dense(hj)?;
    let mut j4 = Dense::zero(-4, 4 * hj);
    for (i, x) in j.num.iter().enumerate() {
        j4.num[4 * i] = x.clone();
    }
    j4.den = j.den.clone();

    let mut chains: Vec<Vec<Dense>> = sd.neg.iter().map(|(_, d)| vec![trunc(d)]).collect();
    let lo = -n.max(1);
    let mut acc = Dense::zero(lo, hs);
    for e in lo..0 {
        let want = principal.0.get(&e).cloned().unwrap_or_else(Rational::zero);
        let diff = want - acc.coeff(e);
        if diff.is_zero() {
            continue;
        }
        if !plus_allowed(tw, e) {
            return Err(Error::NoSuchForm(format!("elimination produced exponent {e} outside the plus space")));
        }
        let pick = sd
            .neg
            .iter()
            .enumerate()
            .filter(|(_, (p, _))| (p - e).rem_euclid(4) == 0 && *p >= e)
            .min_by_key(|(_, (p, _))| p - e)
            .map(|(i, (p, _))| (i, ((p - e) / 4) as usize));
        let Some((si, steps)) = pick else {
            return Err(Error::NoSuchForm(format!("no seed reaches exponent {e} in weight {tw}/2")));
        };
        while chains[si].len() <= steps {
            let next = j4.mul(chains[si].last().unwrap());
            chains[si].push(next);
        }
        let el = &chains[si][steps];
        acc.axpy(&(diff / el.coeff(e)), el);
    }
    let mut cusp = Vec::new();
    if tw > 0 {
        for (p, b) in &sd.holo {
            let c = acc.coeff(*p);
            if !c.is_zero() {
                acc.axpy(&-c, &trunc(b));
            }
            if *p > 0 {
                let mut b = trunc(b);
                b.truncate(horizon);
                cusp.push(QSeries::from_dense(tw, Level::Gamma04, true, &b));
            }
        }
    }
    if acc.horizon() < horizon {
        return Err(Error::Horizon { needed: horizon, have: acc.horizon() });
    }
    acc.truncate(horizon);
    acc.normalize();
    Ok((QSeries::from_dense(tw, Level::Gamma04, true, &acc), cusp))
}

/// The unique weakly holomorphic plus-space form with principal part
/// `principal`, normalized "+O(q)" in positive weight and "+O(1)" in
/// negative weight. Fails when cusp forms make the form non-unique.
pub fn weakly_holo_plus_basis(twice_weight: i32, principal: &PrincipalPart, horizon: i64) -> Result<QSeries> {
    let (f, cusp) = weakly_holo_plus_affine(twice_weight, principal, horizon)?;
    if !cusp.is_empty() {
        return Err(Error::NoSuchForm(format!(
            "weight {twice_weight}/2 has {} cusp form(s); the principal part does not determine the form",
            cusp.len()
        )));
    }
    Ok(f)
}

/// Principal part from (exponent, coefficient) pairs.
pub fn principal_from<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> Result<PrincipalPart> {
    let mut p = PrincipalPart::new();
    let m: BTreeMap<i64, Rational> = it.into_iter().collect();
    for (e, c) in m {
        p.add(e, c)?;
    }
    Ok(p)
}

/// Single-term principal part q^{e}.
pub fn unit_principal(e: i64) -> Result<PrincipalPart> {
    PrincipalPart::single(e, Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rint};

    #[test]
    fn constant_from_pairing_matches_full_form() {
        for (tw, pp) in [(-1, vec![(-5, 1)]), (-1, vec![(-20, 1), (-5, -2)]), (-3, vec![(-4, 1)]), (-7, vec![(-8, 3), (-3, 1)])] {
            let p = principal_from(pp.into_iter().map(|(e, c)| (e, rint(c)))).unwrap();
            let full = weakly_holo_plus_basis(tw, &p, 4).unwrap();
            assert_eq!(weakly_holo_plus_constant(tw, &p).unwrap(), full.coeff(0).unwrap());
        }
        assert_eq!(weakly_holo_plus_constant(-1, &unit_principal(-5).unwrap()).unwrap(), rint(48));
        assert!(weakly_holo_plus_constant(-9, &unit_principal(-4).unwrap()).is_err());
    }

    #[test]
    fn holomorphic_dimensions() {
        assert_eq!(plus_space_basis(5, 20).unwrap().len(), 1);
        assert_eq!(plus_space_basis(13, 20).unwrap().len(), 2);
        assert_eq!(plus_space_basis(9, 20).unwrap().len(), 1);
        assert_eq!(plus_space_basis(-1, 20).unwrap().len(), 0);
    }

    #[test]
    fn cohen_matches_basis() {
        let c = cohen_eisenstein(2, 20).unwrap();
        assert_eq!(c.coeff(0).unwrap(), rat(1, 120));
        assert_eq!(c.coeff(5).unwrap(), rat(-2, 5));
        assert_eq!(c.coeff(2).unwrap(), rint(0));
        let b = &plus_space_basis(5, 20).unwrap()[0];
        let scaled = b.scale(&rat(1, 120));
        assert!(scaled.agrees_to(&c, 20).unwrap());
    }

    #[test]
    fn weakly_holomorphic_examples() {
        let f = weakly_holo_plus_basis(5, &unit_principal(-4).unwrap(), 20).unwrap();
        assert_eq!(f.coeff(-4).unwrap(), rint(1));
        assert_eq!(f.coeff(0).unwrap(), rint(0));
        assert!(f.check_plus());
        assert!(weakly_holo_plus_basis(5, &unit_principal(-2).unwrap(), 20).is_err());
        let g = weakly_holo_plus_basis(-1, &unit_principal(-5).unwrap(), 20).unwrap();
        assert_eq!(g.coeff(-5).unwrap(), rint(1));
        assert_eq!(g.coeff(-4).unwrap(), rint(0));
        assert_eq!(g.coeff(-1).unwrap(), rint(0));
        assert!(g.check_plus());
        assert!(weakly_holo_plus_basis(13, &unit_principal(-4).unwrap(), 10).is_err());
    }

    #[test]
    fn zagier_weight_half_forms() {
        // Zagier's f_3 = q^{-3} − 248q + 26752q^4 − …, weight 1/2
        let f3 = weakly_holo_plus_basis(1, &unit_principal(-3).unwrap(), 5).unwrap();
        assert_eq!(f3.coeff(1).unwrap(), rint(-248));
        assert_eq!(f3.coeff(4).unwrap(), rint(26752));
        // g_1 = q^{-1} − 2 + 248q³ − 492q⁴ + …, weight 3/2
        let g1 = weakly_holo_plus_basis(3, &unit_principal(-1).unwrap(), 4).unwrap();
        assert_eq!(g1.coeff(3).unwrap(), rint(248));
        assert_eq!(g1.coeff(4).unwrap(), rint(-492));
    }
}
