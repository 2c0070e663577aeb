//! Binary quadratic forms [a,b,c]: reduction, class enumeration, genus
//! characters, Pell automorphs, Heegner points and geodesics.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_square, isqrt, kronecker};
use crate::error::{Error, Result};

/// 2×2 integer matrix [[p, q], [r, s]].
pub type Mat2 = [[i128; 2]; 2];

pub fn mat_mul(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let a = x[i][0].checked_mul(y[0][j]);
            let b = x[i][1].checked_mul(y[1][j]);
            out[i][j] = match (a, b) {
                (Some(a), Some(b)) => a.checked_add(b),
                _ => None,
            }
            .ok_or_else(|| Error::Budget("matrix entries overflow i128".into()))?;
        }
    }
    Ok(out)
}

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

/// Möbius action on the upper half plane.
pub fn mobius(m: &Mat2, z: Complex64) -> Complex64 {
    let (p, q, r, s) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
    (z * p + q) / (z * r + s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BQForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BQForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a == 0 && b == 0 && c == 0 {
            return Err(Error::Domain("zero quadratic form".into()));
        }
        Ok(BQForm { a, b, c })
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    /// Q(τ, 1) for complex τ.
    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        z * z * self.a as f64 + z * self.b as f64 + self.c as f64
    }

    /// (Q∘M)(x, y) = Q(px + qy, rx + sy).
    pub fn act(&self, m: &Mat2) -> Result<BQForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (m[0][0], m[0][1], m[1][0], m[1][1]);
        let na = a * p * p + b * p * r + c * r * r;
        let nb = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let nc = a * q * q + b * q * s + c * s * s;
        let cv = |x: i128| i64::try_from(x).map_err(|_| Error::Budget("form coefficients overflow".into()));
        Ok(BQForm { a: cv(na)?, b: cv(nb)?, c: cv(nc)? })
    }

    pub fn neg(&self) -> BQForm {
        BQForm { a: -self.a, b: -self.b, c: -self.c }
    }

    pub fn as_array(&self) -> [i64; 3] {
        [self.a, self.b, self.c]
    }

    // -- definite ----------------------------------------------------------

    pub fn is_reduced_definite(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && -a < b && b <= a && a <= c && !(a == c && b < 0)
    }

    /// Reduced form equivalent to a positive definite form together with
    /// M such that self∘M is reduced.
    pub fn reduce_definite(&self) -> Result<(BQForm, Mat2)> {
        if self.disc() >= 0 || self.a <= 0 {
            return Err(Error::Domain(format!("{self:?} is not positive definite")));
        }
        let mut q = *self;
        let mut m = IDENTITY;
        loop {
            // translate b into (−a, a]
            let two_a = 2 * q.a;
            let n = (q.a - q.b).div_euclid(two_a);
            if n != 0 {
                let t: Mat2 = [[1, n as i128], [0, 1]];
                q = q.act(&t)?;
                m = mat_mul(&m, &t)?;
            }
            if q.a > q.c || (q.a == q.c && q.b < 0) {
                let s: Mat2 = [[0, -1], [1, 0]];
                q = q.act(&s)?;
                m = mat_mul(&m, &s)?;
                continue;
            }
            if q.is_reduced_definite() {
                return Ok((q, m));
            }
        }
    }

    // -- indefinite --------------------------------------------------------

    pub fn is_reduced_indefinite(&self) -> bool {
        let d = self.disc();
        if d <= 0 || is_square(d) {
            return false;
        }
        let r = isqrt(d as u64) as i64;
        // 0 < b < √Δ and √Δ − b < 2|a| < √Δ + b, with √Δ irrational
        let a2 = 2 * self.a.abs();
        self.b > 0 && self.b <= r && a2 > r - self.b && a2 <= r + self.b
    }

    /// One ρ step: Q ↦ Q∘[[0,−1],[1,s]].
    pub fn rho(&self) -> Result<(BQForm, Mat2)> {
        let d = self.disc();
        let r = isqrt(d as u64) as i64;
        let c2 = 2 * self.c.abs();
        if self.c == 0 {
            return Err(Error::Domain("rho needs c != 0".into()));
        }
        // target window for b' ≡ −b (mod 2|c|)
        let hi = if self.c.abs() as f64 > (d as f64).sqrt() { self.c.abs() } else { r };
        let nb = hi - (hi + self.b).rem_euclid(c2);
        let s = (nb + self.b) / (2 * self.c);
        let m: Mat2 = [[0, -1], [1, s as i128]];
        Ok((self.act(&m)?, m))
    }

    /// Reduced indefinite form equivalent to self, and M with self∘M reduced.
    pub fn reduce_indefinite(&self) -> Result<(BQForm, Mat2)> {
        let d = self.disc();
        if d <= 0 || is_square(d) {
            return Err(Error::Domain(format!("{self:?} needs a positive non-square discriminant")));
        }
        let mut q = *self;
        let mut m = IDENTITY;
        if q.c == 0 {
            // make c nonzero by a shear
            let t: Mat2 = [[1, 0], [1, 1]];
            q = q.act(&t)?;
            m = t;
        }
        let mut steps = 0;
        while !q.is_reduced_indefinite() {
            let (nq, step) = q.rho()?;
            q = nq;
            m = mat_mul(&m, &step)?;
            steps += 1;
            if steps > 10_000 {
                return Err(Error::Budget("indefinite reduction did not terminate".into()));
            }
        }
        Ok((q, m))
    }

    /// The ρ-cycle of a reduced indefinite form, with the cumulative
    /// matrix taking the form once around.
    pub fn cycle(&self) -> Result<(Vec<BQForm>, Mat2)> {
        if !self.is_reduced_indefinite() {
            return Err(Error::Domain(format!("{self:?} is not reduced")));
        }
        let mut forms = vec![*self];
        let mut m = IDENTITY;
        let mut q = *self;
        loop {
            let (nq, step) = q.rho()?;
            m = mat_mul(&m, &step)?;
            if nq == *self {
                return Ok((forms, m));
            }
            forms.push(nq);
            q = nq;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSet {
    pub disc: i64,
    pub reps: Vec<BQForm>,
}

static CLASSES: Lazy<Mutex<HashMap<i64, Arc<ClassSet>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn check_disc(delta: i64) -> Result<()> {
    if !matches!(delta.rem_euclid(4), 0 | 1) || delta == 0 {
        return Err(Error::Domain(format!("{delta} is not a discriminant")));
    }
    if delta > 0 && is_square(delta) {
        return Err(Error::Domain(format!("square discriminant {delta} is excluded")));
    }
    Ok(())
}

fn definite_reps(delta: i64) -> Vec<BQForm> {
    let n = -delta;
    let mut reps = Vec::new();
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b * b + n) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + n) / (4 * a);
            let q = BQForm { a, b, c };
            if q.is_reduced_definite() {
                reps.push(q);
            }
        }
        a += 1;
    }
    reps
}

fn indefinite_reps(delta: i64) -> Result<Vec<BQForm>> {
    let r = isqrt(delta as u64) as i64;
    let mut reduced = Vec::new();
    for b in 1..=r {
        if (b * b - delta) % 4 != 0 {
            continue;
        }
        let ac = (b * b - delta) / 4; // a·c, negative
        for a_abs in 1..=ac.abs() {
            if ac % a_abs != 0 {
                continue;
            }
            for a in [a_abs, -a_abs] {
                let q = BQForm { a, b, c: ac / a };
                if q.is_reduced_indefinite() {
                    reduced.push(q);
                }
            }
        }
    }
    reduced.sort();
    let mut seen = std::collections::HashSet::new();
    let mut reps = Vec::new();
    for q in reduced {
        if seen.contains(&q) {
            continue;
        }
        let (cyc, _) = q.cycle()?;
        seen.extend(cyc.iter().copied());
        reps.push(q);
    }
    Ok(reps)
}

/// Representatives of SL₂(ℤ)\𝒬_Δ (positive definite classes only when Δ < 0).
pub fn enumerate_classes(delta: i64) -> Result<Arc<ClassSet>> {
    check_disc(delta)?;
    if let Some(c) = CLASSES.lock().get(&delta) {
        return Ok(c.clone());
    }
    let reps = if delta < 0 { definite_reps(delta) } else { indefinite_reps(delta)? };
    let cs = Arc::new(ClassSet { disc: delta, reps });
    CLASSES.lock().insert(delta, cs.clone());
    Ok(cs)
}

/// Genus character χ_{D₁}(Q) on forms of discriminant D₁D₂.
pub fn genus_character(q: &BQForm, d1: i64, d2: i64) -> Result<i64> {
    if q.disc() != d1 * d2 {
        return Err(Error::Incompatible(format!("disc {} != {d1}·{d2}", q.disc())));
    }
    if gcd(q.content(), d1) != 1 {
        return Ok(0);
    }
    let mut bound = 8i64;
    loop {
        if let Some(r) = represented_coprime(q, d1, bound, None) {
            return Ok(kronecker(d1, r));
        }
        bound *= 2;
        if bound > 1 << 20 {
            return Err(Error::Budget("no represented value coprime to D1 found".into()));
        }
    }
}

/// A value Q(x,y) ≠ 0 with coprime (x,y) in the box |x|,|y| ≤ bound and
/// gcd with d1 equal to 1, skipping `avoid`.
pub fn represented_coprime(q: &BQForm, d1: i64, bound: i64, avoid: Option<i64>) -> Option<i64> {
    for s in 1..=bound {
        for x in -s..=s {
            for y in [-s, s] {
                for (x, y) in [(x, y), (y, x)] {
                    if gcd(x, y) != 1 {
                        continue;
                    }
                    let r = q.eval(x, y);
                    if r != 0 && gcd(r, d1) == 1 && Some(r) != avoid {
                        return Some(r);
                    }
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    pub t: i128,
    pub u: i128,
}

/// Smallest positive solution of t² − Δu² = 4, read off the ρ-cycle of
/// the principal form.
pub fn pell(delta: i64) -> Result<PellSolution> {
    check_disc(delta)?;
    if delta < 0 {
        return Err(Error::Domain("Pell needs a positive discriminant".into()));
    }
    let b = delta.rem_euclid(2);
    let principal = BQForm { a: 1, b, c: (b * b - delta) / 4 };
    let (red, _) = principal.reduce_indefinite()?;
    let (_, m) = red.cycle()?;
    let t = (m[0][0] + m[1][1]).abs();
    let u = (m[1][0] / red.a as i128).abs();
    Ok(PellSolution { t, u })
}

/// g_Q = [[(t+bu)/2, cu], [−au, (t−bu)/2]], the generator of the proper
/// stabilizer of an indefinite Q.
pub fn automorph(q: &BQForm) -> Result<Mat2> {
    let PellSolution { t, u } = pell(q.disc())?;
    let (a, b, c) = (q.a as i128, q.b as i128, q.c as i128);
    Ok([[(t + b * u) / 2, c * u], [-a * u, (t - b * u) / 2]])
}

/// Heegner point τ_Q and ω_Q for a positive definite form.
pub fn heegner_point(q: &BQForm) -> Result<(Complex64, i64)> {
    let d = q.disc();
    if d >= 0 || q.a <= 0 {
        return Err(Error::Domain(format!("{q:?} is not positive definite")));
    }
    let tau = Complex64::new(-q.b as f64, ((-d) as f64).sqrt()) / (2.0 * q.a as f64);
    let (r, _) = q.reduce_definite()?;
    let omega = if r.b == 0 && r.a == r.c {
        2
    } else if r.a == r.b && r.b == r.c {
        3
    } else {
        1
    };
    Ok((tau, omega))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    pub center: f64,
    pub radius: f64,
    /// +1 counterclockwise (a > 0), −1 clockwise
    pub orientation: i64,
}

/// The semicircle a|τ|² + bx + c = 0 attached to an indefinite form.
pub fn geodesic(q: &BQForm) -> Result<Geodesic> {
    let d = q.disc();
    if d <= 0 || is_square(d) {
        return Err(Error::Domain("geodesic needs positive non-square discriminant".into()));
    }
    if q.a == 0 {
        return Err(Error::Domain("geodesic needs a != 0".into()));
    }
    Ok(Geodesic {
        center: -(q.b as f64) / (2.0 * q.a as f64),
        radius: (d as f64).sqrt() / (2.0 * q.a.abs() as f64),
        orientation: q.a.signum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_examples() {
        assert_eq!(enumerate_classes(-4).unwrap().reps, vec![BQForm { a: 1, b: 0, c: 1 }]);
        assert_eq!(enumerate_classes(5).unwrap().reps.len(), 1);
        assert_eq!(enumerate_classes(-23).unwrap().reps.len(), 3);
        assert!(enumerate_classes(9).is_err());
        assert!(enumerate_classes(7).is_err());
    }

    #[test]
    fn pell_examples() {
        assert_eq!(pell(5).unwrap(), PellSolution { t: 3, u: 1 });
        assert_eq!(pell(12).unwrap(), PellSolution { t: 4, u: 1 });
        assert_eq!(pell(13).unwrap(), PellSolution { t: 11, u: 3 });
        let q = BQForm { a: 1, b: 1, c: -1 };
        let g = automorph(&q).unwrap();
        assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], 1);
        assert_eq!(q.act(&g).unwrap(), q);
    }

    #[test]
    fn heegner_examples() {
        let (t, w) = heegner_point(&BQForm { a: 1, b: 0, c: 1 }).unwrap();
        assert!((t - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(w, 2);
        assert_eq!(heegner_point(&BQForm { a: 1, b: 1, c: 1 }).unwrap().1, 3);
        assert_eq!(heegner_point(&BQForm { a: 1, b: 0, c: 2 }).unwrap().1, 1);
    }

    #[test]
    fn geodesic_examples() {
        let g = geodesic(&BQForm { a: 1, b: 1, c: -1 }).unwrap();
        assert_eq!(g.center, -0.5);
        assert!((g.radius - 5f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(g.orientation, 1);
        assert_eq!(geodesic(&BQForm { a: -1, b: -1, c: 1 }).unwrap().orientation, -1);
        let g = geodesic(&BQForm { a: 1, b: 0, c: -2 }).unwrap();
        assert_eq!(g.center, 0.0);
        assert!((g.radius - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn genus_examples() {
        let q = BQForm { a: 1, b: 0, c: -3 };
        assert_eq!(genus_character(&BQForm { a: 2, b: 1, c: 3 }, 1, -23).unwrap(), 1);
        assert_eq!(genus_character(&q, -3, -4).unwrap(), 1);
        assert_eq!(genus_character(&BQForm { a: 3, b: 3, c: 3 }, -3, 9).unwrap(), 0);
        assert_eq!(genus_character(&BQForm { a: 3, b: 0, c: 3 }, -3, 12).unwrap(), 0);
    }
}
