//! Sparse Laurent q-expansions with exact rational coefficients and an
//! explicit truncation horizon, plus the constructions of the standard
//! integral-weight and level-4 plus-space forms.

mod dense;
mod forms;
mod linalg;
mod plus;

pub use dense::Dense;
pub use forms::*;
pub use plus::*;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rint, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "sl2z")]
    Sl2z,
    #[serde(rename = "gamma0_4")]
    Gamma04,
}

/// Does exponent `n` satisfy the plus-space condition for weight tw/2?
pub fn plus_allowed(twice_weight: i32, n: i64) -> bool {
    let lambda = (twice_weight as i64 - 1).div_euclid(2);
    let s = if lambda.rem_euclid(2) == 0 { n } else { -n };
    matches!(s.rem_euclid(4), 0 | 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    coeffs: BTreeMap<i64, Rational>,
    horizon: i64,
    twice_weight: i32,
    level: Level,
    plus: bool,
}

/// Negative-exponent part of a Laurent expansion.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PrincipalPart(pub BTreeMap<i64, Rational>);

impl PrincipalPart {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(exp: i64, c: Rational) -> Result<Self> {
        let mut p = Self::new();
        p.add(exp, c)?;
        Ok(p)
    }

    pub fn add(&mut self, exp: i64, c: Rational) -> Result<()> {
        if exp >= 0 {
            return Err(Error::Domain(format!("principal exponent {exp} is not negative")));
        }
        let e = self.0.entry(exp).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&exp);
        }
        Ok(())
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.0.keys().next().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl QSeries {
    /// The zero series known up to `horizon`.
    pub fn zero(twice_weight: i32, level: Level, plus: bool, horizon: i64) -> Self {
        QSeries { coeffs: BTreeMap::new(), horizon, twice_weight, level, plus }
    }

    pub fn from_coeffs<I>(twice_weight: i32, level: Level, plus: bool, horizon: i64, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut s = Self::zero(twice_weight, level, plus, horizon);
        for (e, c) in it {
            if e > horizon {
                continue;
            }
            if c.is_zero() {
                continue;
            }
            if plus && !plus_allowed(twice_weight, e) {
                return Err(Error::Domain(format!(
                    "exponent {e} violates the plus-space condition in weight {twice_weight}/2"
                )));
            }
            *s.coeffs.entry(e).or_insert_with(Rational::zero) += c;
        }
        s.coeffs.retain(|_, c| !c.is_zero());
        Ok(s)
    }

    pub(crate) fn from_dense(twice_weight: i32, level: Level, plus: bool, d: &Dense) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, n) in d.num.iter().enumerate() {
            if !n.is_zero() {
                coeffs.insert(d.val + i as i64, Rational::new(n.clone(), d.den.clone()));
            }
        }
        QSeries { coeffs, horizon: d.horizon(), twice_weight, level, plus }
    }

    pub(crate) fn to_dense(&self) -> Dense {
        let val = self.coeffs.keys().next().copied().unwrap_or(self.horizon).min(self.horizon);
        let len = (self.horizon - val + 1).max(0) as usize;
        let mut v = vec![Rational::zero(); len];
        for (e, c) in &self.coeffs {
            v[(e - val) as usize] = c.clone();
        }
        Dense::from_rationals(val, &v)
    }

    /// Single monomial c·q^e.
    pub fn monomial(twice_weight: i32, level: Level, e: i64, c: Rational, horizon: i64) -> Self {
        let mut s = Self::zero(twice_weight, level, false, horizon);
        if e <= horizon && !c.is_zero() {
            s.coeffs.insert(e, c);
        }
        s
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }
    pub fn twice_weight(&self) -> i32 {
        self.twice_weight
    }
    pub fn level(&self) -> Level {
        self.level
    }
    pub fn is_plus(&self) -> bool {
        self.plus
    }

    pub fn with_meta(mut self, twice_weight: i32, level: Level, plus: bool) -> Result<Self> {
        if plus {
            if let Some(e) = self.coeffs.keys().find(|&&e| !plus_allowed(twice_weight, e)) {
                return Err(Error::Domain(format!("exponent {e} violates the plus condition")));
            }
        }
        self.twice_weight = twice_weight;
        self.level = level;
        self.plus = plus;
        Ok(self)
    }

    /// Coefficient at q^n; errors if n lies beyond the horizon.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n > self.horizon {
            return Err(Error::Horizon { needed: n, have: self.horizon });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(Rational::zero))
    }

    /// Iterator over stored nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn principal_part(&self) -> PrincipalPart {
        PrincipalPart(self.coeffs.range(..0).map(|(e, c)| (*e, c.clone())).collect())
    }

    pub fn truncate(&self, n: i64) -> Result<Self> {
        if n > self.horizon {
            return Err(Error::Horizon { needed: n, have: self.horizon });
        }
        let mut s = self.clone();
        s.coeffs.retain(|e, _| *e <= n);
        s.horizon = n;
        Ok(s)
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.twice_weight != other.twice_weight || self.level != other.level {
            return Err(Error::Incompatible(format!(
                "weights {}/2 vs {}/2 or levels {:?} vs {:?}",
                self.twice_weight, other.twice_weight, self.level, other.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let h = self.horizon.min(other.horizon);
        let mut s = Self::zero(self.twice_weight, self.level, self.plus && other.plus, h);
        for (e, c) in self.coeffs.range(..=h).chain(other.coeffs.range(..=h)) {
            *s.coeffs.entry(*e).or_insert_with(Rational::zero) += c;
        }
        s.coeffs.retain(|_, c| !c.is_zero());
        Ok(s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut s = self.clone();
        if c.is_zero() {
            s.coeffs.clear();
            return s;
        }
        for v in s.coeffs.values_mut() {
            *v *= c;
        }
        s
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&rint(c))
    }

    /// Product with the standard Laurent horizon bound
    /// min(H_a + v_b, H_b + v_a).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let level = match (self.level, other.level) {
            (Level::Sl2z, Level::Sl2z) => Level::Sl2z,
            _ => Level::Gamma04,
        };
        let mod4 = |s: &Self| s.coeffs.keys().all(|e| e.rem_euclid(4) == 0) && s.twice_weight % 2 == 0;
        let plus = (self.plus && mod4(other)) || (other.plus && mod4(self));
        let d = self.to_dense().mul(&other.to_dense());
        Ok(Self::from_dense(self.twice_weight + other.twice_weight, level, plus, &d))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let one = Self::one_like(self, self.horizon.max(0));
        let mut r = one.with_weight(0);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b)?;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b)?;
            }
        }
        Ok(r)
    }

    fn one_like(s: &Self, horizon: i64) -> Self {
        Self::monomial(0, s.level, 0, Rational::one(), horizon)
    }

    fn with_weight(mut self, tw: i32) -> Self {
        self.twice_weight = tw;
        self
    }

    /// Multiplicative inverse of a series with known nonzero leading term.
    pub fn inverse(&self) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| Error::Domain("inverse of zero series".into()))?;
        let n = (self.horizon - v) as usize; // relative precision
        let a: Vec<Rational> = (0..=n).map(|i| self.coeffs.get(&(v + i as i64)).cloned().unwrap_or_else(Rational::zero)).collect();
        let a0inv = Rational::one() / &a[0];
        let mut b = vec![Rational::zero(); n + 1];
        b[0] = a0inv.clone();
        for k in 1..=n {
            let mut s = Rational::zero();
            for j in 1..=k {
                if !a[j].is_zero() && !b[k - j].is_zero() {
                    s += &a[j] * &b[k - j];
                }
            }
            b[k] = -s * &a0inv;
        }
        Self::from_coeffs(
            -self.twice_weight,
            self.level,
            false,
            -v + n as i64,
            b.into_iter().enumerate().map(|(i, c)| (-v + i as i64, c)),
        )
    }

    /// q -> q^4.
    pub fn dilate4(&self) -> Self {
        let level = Level::Gamma04;
        let mut s = Self::zero(self.twice_weight, level, false, 4 * self.horizon + 3);
        for (e, c) in &self.coeffs {
            s.coeffs.insert(4 * e, c.clone());
        }
        s
    }

    /// Applies (q d/dq)^e: multiplies the q^n coefficient by n^e.
    pub fn d_power(&self, e: u32) -> Self {
        let mut s = self.clone();
        for (n, c) in s.coeffs.iter_mut() {
            *c *= Rational::from_integer(BigInt::from(*n).pow(e));
        }
        s.coeffs.retain(|_, c| !c.is_zero());
        s.twice_weight = self.twice_weight + 4 * e as i32;
        s
    }

    pub fn check_plus(&self) -> bool {
        self.coeffs.keys().all(|&e| plus_allowed(self.twice_weight, e))
    }

    /// Equality of coefficients up to `n` (both horizons must reach n).
    pub fn agrees_to(&self, other: &Self, n: i64) -> Result<bool> {
        if n > self.horizon || n > other.horizon {
            return Err(Error::Horizon { needed: n, have: self.horizon.min(other.horizon) });
        }
        let a: Vec<_> = self.coeffs.range(..=n).collect();
        let b: Vec<_> = other.coeffs.range(..=n).collect();
        Ok(a == b)
    }

    // -- JSON ---------------------------------------------------------------

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "twice_weight": self.twice_weight,
            "level": self.level,
            "plus": self.plus,
            "horizon": self.horizon,
            "coeffs": self.coeffs.iter().map(|(e, c)| serde_json::json!([e, fmt_rat(c)])).collect::<Vec<_>>(),
        })
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let err = |m: &str| Error::Parse(m.to_string());
        let tw = v["twice_weight"].as_i64().ok_or_else(|| err("twice_weight"))? as i32;
        let level: Level = serde_json::from_value(v["level"].clone()).map_err(|e| err(&e.to_string()))?;
        let plus = v["plus"].as_bool().ok_or_else(|| err("plus"))?;
        let horizon = v["horizon"].as_i64().ok_or_else(|| err("horizon"))?;
        let arr = v["coeffs"].as_array().ok_or_else(|| err("coeffs"))?;
        let mut items = Vec::with_capacity(arr.len());
        let mut last = i64::MIN;
        for it in arr {
            let e = it[0].as_i64().ok_or_else(|| err("exponent"))?;
            if e <= last {
                return Err(err("exponents must be strictly ascending"));
            }
            if e > horizon {
                return Err(err("exponent beyond horizon"));
            }
            last = e;
            let c = parse_rat(it[1].as_str().ok_or_else(|| err("coefficient string"))?)?;
            items.push((e, c));
        }
        Self::from_coeffs(tw, level, plus, horizon, items)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

pub fn fmt_rat(c: &Rational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = fmt_rat(&c.abs());
            if first {
                write!(f, "{sign}{a}q^{e}")?;
            } else {
                write!(f, " {sign} {a}q^{e}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.horizon + 1)
    }
}
