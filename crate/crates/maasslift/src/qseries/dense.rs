//! Dense integer-numerator representation used for the heavy products.
//!
//! A `Dense` holds Σ num[i]/den · q^(val+i) for exponents val..=val+len-1.
//! Keeping a single denominator turns series products into big-integer
//! convolutions, which is several times faster than multiplying rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::Rational;

#[derive(Clone, Debug)]
pub struct Dense {
    pub val: i64,
    pub den: BigInt,
    pub num: Vec<BigInt>,
}

impl Dense {
    pub fn zero(val: i64, horizon: i64) -> Self {
        let len = (horizon - val + 1).max(0) as usize;
        Dense { val, den: BigInt::one(), num: vec![BigInt::zero(); len] }
    }

    pub fn from_ints(val: i64, num: Vec<BigInt>) -> Self {
        Dense { val, den: BigInt::one(), num }
    }

    pub fn horizon(&self) -> i64 {
        self.val + self.num.len() as i64 - 1
    }

    pub fn from_rationals(val: i64, coeffs: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            if !c.is_zero() {
                den = den.lcm(c.denom());
            }
        }
        let num = coeffs
            .iter()
            .map(|c| if c.is_zero() { BigInt::zero() } else { c.numer() * (&den / c.denom()) })
            .collect();
        Dense { val, den, num }
    }

    pub fn coeff(&self, e: i64) -> Rational {
        if e < self.val || e > self.horizon() {
            return Rational::zero();
        }
        Rational::new(self.num[(e - self.val) as usize].clone(), self.den.clone())
    }

    pub fn num_at(&self, e: i64) -> Option<&BigInt> {
        if e < self.val || e > self.horizon() {
            None
        } else {
            Some(&self.num[(e - self.val) as usize])
        }
    }

    /// Drops terms above `h`.
    pub fn truncate(&mut self, h: i64) {
        let len = (h - self.val + 1).max(0) as usize;
        self.num.truncate(len);
    }

    /// Divides out the common content of numerators and denominator.
    pub fn normalize(&mut self) {
        let mut g = self.den.clone();
        for n in &self.num {
            if !n.is_zero() {
                g = g.gcd(n);
                if g.is_one() {
                    return;
                }
            }
        }
        if g.is_zero() || g.is_one() {
            return;
        }
        self.den /= &g;
        for n in self.num.iter_mut() {
            if !n.is_zero() {
                *n /= &g;
            }
        }
    }

    /// Product truncated at the largest exponent known exactly.
    pub fn mul(&self, other: &Dense) -> Dense {
        let va = self.first_nonzero().unwrap_or(self.horizon() + 1);
        let vb = other.first_nonzero().unwrap_or(other.horizon() + 1);
        let h = (self.horizon() + vb).min(other.horizon() + va);
        self.mul_to(other, h)
    }

    /// Product keeping only exponents <= h (caller guarantees validity).
    pub fn mul_to(&self, other: &Dense, h: i64) -> Dense {
        let val = self.val + other.val;
        let len = (h - val + 1).max(0) as usize;
        let a: Vec<(usize, &BigInt)> = self.num.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        let b = &other.num;
        let compute = |k: usize| -> BigInt {
            let mut s = BigInt::zero();
            for &(i, x) in &a {
                if i > k {
                    break;
                }
                let j = k - i;
                if j < b.len() && !b[j].is_zero() {
                    s += x * &b[j];
                }
            }
            s
        };
        let num: Vec<BigInt> = if len * a.len() > 20_000 {
            (0..len).into_par_iter().map(compute).collect()
        } else {
            (0..len).map(compute).collect()
        };
        let mut out = Dense { val, den: &self.den * &other.den, num };
        out.normalize();
        out
    }

    pub fn first_nonzero(&self) -> Option<i64> {
        self.num.iter().position(|x| !x.is_zero()).map(|i| self.val + i as i64)
    }

    /// self += c * other, on the overlap of the two exponent ranges
    /// (the result horizon is the smaller of the two horizons).
    pub fn axpy(&mut self, c: &Rational, other: &Dense) {
        if c.is_zero() {
            return;
        }
        let h = self.horizon().min(other.horizon());
        let val = self.val.min(other.val);
        // new denominator: lcm(self.den, c.den * other.den)
        let od = c.denom() * &other.den;
        let den = self.den.lcm(&od);
        let fs = &den / &self.den;
        let fo = c.numer() * (&den / &od);
        let len = (h - val + 1).max(0) as usize;
        let mut num = vec![BigInt::zero(); len];
        for (i, slot) in num.iter_mut().enumerate() {
            let e = val + i as i64;
            if let Some(x) = self.num_at(e) {
                if !x.is_zero() {
                    *slot = x * &fs;
                }
            }
            if let Some(y) = other.num_at(e) {
                if !y.is_zero() {
                    *slot += y * &fo;
                }
            }
        }
        self.val = val;
        self.den = den;
        self.num = num;
    }

    pub fn scale(&mut self, c: &Rational) {
        for n in self.num.iter_mut() {
            *n *= c.numer();
        }
        self.den *= c.denom();
        if self.den.is_negative() {
            self.den = -&self.den;
            for n in self.num.iter_mut() {
                *n = -&*n;
            }
        }
        self.normalize();
    }
}

/// Coefficients of f^a up to index len-1 for an integer power series with
/// f[0] = 1, by the J.C.P. Miller recurrence
/// n·g_n = Σ_{k=1}^{n} ((a+1)k − n)·f_k·g_{n−k}.
/// Cost is O(len · nnz(f)), which is what makes eta and theta powers cheap.
pub fn pow_unit(f: &[BigInt], a: i64, len: usize) -> Vec<BigInt> {
    assert!(!f.is_empty() && f[0].is_one(), "pow_unit needs f[0] = 1");
    let nz: Vec<(usize, &BigInt)> = f.iter().enumerate().skip(1).filter(|(_, x)| !x.is_zero()).collect();
    let mut g = vec![BigInt::zero(); len];
    if len == 0 {
        return g;
    }
    g[0] = BigInt::one();
    for n in 1..len {
        let mut s = BigInt::zero();
        for &(k, fk) in &nz {
            if k > n {
                break;
            }
            let w = (a + 1) * k as i64 - n as i64;
            if w != 0 && !g[n - k].is_zero() {
                s += fk * &g[n - k] * w;
            }
        }
        g[n] = s / n as i64;
    }
    g
}
