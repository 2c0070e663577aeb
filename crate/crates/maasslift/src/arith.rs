//! Exact number-theoretic primitives: Kronecker symbols, Bernoulli numbers,
//! generalized Bernoulli numbers and L-values at non-positive integers,
//! divisor sums, the Möbius function and the theta multiplier unit.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::error::{Error, Result};

/// Exact rational coefficient type used throughout.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion, adequate for magnitudes below ~1e300.
pub fn to_f64(r: &Rational) -> f64 {
    big_ratio_f64(r.numer(), r.denom())
}

fn big_ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // keep ~60 significant bits of each before dividing
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let nn: f64 = num_traits::ToPrimitive::to_f64(&(n >> shift_n as usize)).unwrap_or(f64::NAN);
    let dd: f64 = num_traits::ToPrimitive::to_f64(&(d >> shift_d as usize)).unwrap_or(f64::NAN);
    let e = shift_n - shift_d;
    nn / dd * 2f64.powi(e as i32)
}

// ---------------------------------------------------------------------------
// Discriminants
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Discriminant {
    pub value: i64,
    pub is_fundamental: bool,
}

impl Discriminant {
    pub fn new(value: i64) -> Result<Self> {
        if value == 0 || value.rem_euclid(4) > 1 {
            return Err(Error::Domain(format!("{value} is not a discriminant")));
        }
        Ok(Discriminant { value, is_fundamental: is_fundamental(value) })
    }

    /// Like `new`, but additionally insists on a fundamental discriminant.
    pub fn fundamental(value: i64) -> Result<Self> {
        let d = Self::new(value)?;
        if !d.is_fundamental {
            return Err(Error::Domain(format!("{value} is not a fundamental discriminant")));
        }
        Ok(d)
    }
}

pub fn is_squarefree(n: i64) -> bool {
    let mut n = n.unsigned_abs();
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Fundamental discriminants `d` with `lo <= d <= hi`, ascending.
pub fn fundamental_discriminants(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).filter(|&d| is_fundamental(d)).collect()
}

/// Writes a discriminant as `d0 * f^2` with `d0` fundamental.
pub fn fundamental_part(delta: i64) -> Result<(i64, i64)> {
    Discriminant::new(delta)?;
    let mut f = 1i64;
    let mut best = (delta, 1);
    while f * f <= delta.abs() {
        if delta % (f * f) == 0 && is_fundamental(delta / (f * f)) {
            best = (delta / (f * f), f);
        }
        f += 1;
    }
    if !is_fundamental(best.0) {
        return Err(Error::Domain(format!("no fundamental part for {delta}")));
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Kronecker symbol
// ---------------------------------------------------------------------------

fn jacobi(mut a: i64, mut n: i64) -> i64 {
    debug_assert!(n > 0 && n % 2 == 1);
    a = a.rem_euclid(n);
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 { t } else { 0 }
}

/// The fully extended Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut r = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            r = -r;
        }
    }
    let v = n.trailing_zeros();
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            r = -r;
        }
        n >>= v;
    }
    if n == 1 {
        return r;
    }
    r * jacobi(a, n)
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

static BERNOULLI: Lazy<RwLock<Vec<Rational>>> = Lazy::new(|| RwLock::new(vec![Rational::one()]));

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one(); n + 1];
    for k in 1..n {
        row[k] = &row[k - 1] * BigInt::from(n - k + 1) / BigInt::from(k);
    }
    row
}

/// Bernoulli number B_n with B_1 = -1/2. Values are memoized.
pub fn bernoulli(n: usize) -> Rational {
    if let Some(b) = BERNOULLI.read().get(n) {
        return b.clone();
    }
    let mut cache = BERNOULLI.write();
    while cache.len() <= n {
        let m = cache.len();
        let row = binomial_row(m + 1);
        let mut s = Rational::zero();
        for (j, b) in cache.iter().enumerate() {
            if !b.is_zero() {
                s += Rational::from_integer(row[j].clone()) * b;
            }
        }
        cache.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    cache[n].clone()
}

/// Bernoulli polynomial B_n(x).
pub fn bernoulli_poly(n: usize, x: &Rational) -> Rational {
    let row = binomial_row(n);
    let mut s = Rational::zero();
    let mut xp = Rational::one();
    // sum_j C(n,j) B_j x^{n-j}, accumulated from j = n downwards
    for j in (0..=n).rev() {
        let b = bernoulli(j);
        if !b.is_zero() {
            s += Rational::from_integer(row[j].clone()) * b * &xp;
        }
        xp *= x;
    }
    s
}

/// Generalized Bernoulli number B_{k,χ_Δ} for a fundamental discriminant Δ.
pub fn gen_bernoulli(k: usize, delta: i64) -> Result<Rational> {
    let d = Discriminant::new(delta)?;
    if !d.is_fundamental {
        return Err(Error::Domain(format!("{delta} is not fundamental")));
    }
    let f = delta.abs();
    let mut s = Rational::zero();
    for a in 1..=f {
        let chi = kronecker(delta, a);
        if chi != 0 {
            let b = bernoulli_poly(k, &rat(a, f));
            if chi > 0 { s += b } else { s -= b }
        }
    }
    Ok(s * Rational::from_integer(BigInt::from(f).pow(k.saturating_sub(1) as u32)))
}

/// L_Δ(1-k) = -B_{k,χ_Δ}/k for k >= 1 (Δ = 1 gives ζ(1-k)).
pub fn l_value_neg(delta: i64, k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    Ok(-gen_bernoulli(k, delta)? / rint(k as i64))
}

/// ζ(1-k) for k >= 1.
pub fn zeta_neg(k: usize) -> Rational {
    l_value_neg(1, k).expect("1 is fundamental")
}

// ---------------------------------------------------------------------------
// Multiplicative functions
// ---------------------------------------------------------------------------

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn divisor_sum(m: u64, e: u32) -> BigInt {
    divisors(m).into_iter().map(|d| BigInt::from(d).pow(e)).sum()
}

pub fn moebius(n: u64) -> i64 {
    assert!(n > 0);
    let mut n = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// ε_d: 1 for d ≡ 1 (mod 4), i for d ≡ 3 (mod 4).
pub fn eps(d: i64) -> Result<Complex64> {
    match d.rem_euclid(4) {
        1 => Ok(Complex64::new(1.0, 0.0)),
        3 => Ok(Complex64::new(0.0, 1.0)),
        _ => Err(Error::Domain(format!("eps undefined for even {d}"))),
    }
}

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u64);
    r * r == n as u64
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m` (gcd must be 1).
pub fn inv_mod(a: i64, m: i64) -> i64 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Exact integer power p^e as a rational, allowing negative exponents.
pub fn rpow(p: i64, e: i64) -> Rational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(b)
    } else {
        Rational::new(BigInt::one(), b)
    }
}

pub fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 { 1 } else { -1 }
}

pub fn abs_i(r: &Rational) -> Rational {
    r.abs()
}
