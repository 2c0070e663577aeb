//! Half-integral weight Kloosterman sums
//! K_κ(m,n;c) = 2^{−1/2}(1+(4/c))(1−(−1)^λ i) Σ_{ν mod 4c}^* (4c/ν) ε_ν^{2κ} e((mν̄+nν)/4c)
//! with λ = κ − 1/2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::arith::{factorize, gcd, inv_mod, kronecker};

fn lambda(tw: i32) -> i64 {
    (tw as i64 - 1).div_euclid(2)
}

fn prefactor(tw: i32, c: u64) -> Complex64 {
    // 1 + (4/c) is 2 for odd c and 1 for even c
    let two = if c % 2 == 0 { 1.0 } else { 2.0 };
    let s = if lambda(tw).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex64::new(1.0, -s) * (two * FRAC_1_SQRT_2)
}

/// i^{tw}, the value of ε_ν^{2κ} for ν ≡ 3 (mod 4).
fn i_pow(tw: i32) -> Complex64 {
    match tw.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn expi(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// Direct evaluation, one ν at a time.
pub fn kloosterman_half(tw: i32, m: i64, n: i64, c: u64) -> Complex64 {
    assert!(tw % 2 != 0, "half-integral weight expected");
    let big = 4 * c as i64;
    let eps3 = i_pow(tw);
    let mut s = Complex64::new(0.0, 0.0);
    for nu in 1..big {
        if gcd(nu, big) != 1 {
            continue;
        }
        let nub = inv_mod(nu, big);
        let chi = kronecker(big, nu) as f64;
        let eps = if nu % 4 == 1 { Complex64::new(1.0, 0.0) } else { eps3 };
        let ph = (m.rem_euclid(big) * nub + n.rem_euclid(big) * nu).rem_euclid(big);
        s += eps * chi * expi(2.0 * PI * ph as f64 / big as f64);
    }
    prefactor(tw, c) * s
}

/// Table of e(j/N), j = 0..N, built from two short exact tables.
fn unit_roots(big: usize) -> Vec<Complex64> {
    const B: usize = 64;
    let step = 2.0 * PI / big as f64;
    let small: Vec<Complex64> = (0..B).map(|r| expi(step * r as f64)).collect();
    let mut out = Vec::with_capacity(big);
    let mut blk = 0;
    while blk < big {
        let base = expi(step * blk as f64);
        for s in small.iter().take((big - blk).min(B)) {
            out.push(base * s);
        }
        blk += B;
    }
    out
}

/// Jacobi symbols (r/c) for r = 0..c, c odd.
fn jacobi_table(c: u64) -> Vec<i8> {
    let c = c as usize;
    let mut t = vec![1i8; c];
    for (p, e) in factorize(c as u64) {
        let p = p as usize;
        if e % 2 == 0 {
            for (r, v) in t.iter_mut().enumerate() {
                if r % p == 0 {
                    *v = 0;
                }
            }
            continue;
        }
        let mut leg = vec![-1i8; p];
        leg[0] = 0;
        for x in 1..p {
            leg[x * x % p] = 1;
        }
        for (r, v) in t.iter_mut().enumerate() {
            *v *= leg[r % p];
        }
    }
    if c == 1 {
        t[0] = 1;
    }
    t
}

/// Inverses modulo `big` of the given units (batch inversion).
fn batch_inverse(units: &[u64], big: u64) -> Vec<u64> {
    if units.is_empty() {
        return Vec::new();
    }
    let mut prefix = Vec::with_capacity(units.len());
    let mut acc = 1u64;
    for &u in units {
        acc = acc * u % big;
        prefix.push(acc);
    }
    let mut inv = inv_mod(acc as i64, big as i64) as u64;
    let mut out = vec![0; units.len()];
    for i in (0..units.len()).rev() {
        let before = if i == 0 { 1 } else { prefix[i - 1] };
        out[i] = inv * before % big;
        inv = inv * units[i] % big;
    }
    out
}

/// K_κ(m, ·; c) for fixed (κ, m, c), evaluated at many n.
pub struct KloostermanRow {
    big: usize,
    roots: Vec<Complex64>,
    /// weight times e(mν̄/N) at ν = 2j+1, zero for ν not coprime to N
    odd: Vec<Complex64>,
    pref: Complex64,
}

pub fn kloosterman_row(tw: i32, m: i64, c: u64) -> KloostermanRow {
    assert!(tw % 2 != 0, "half-integral weight expected");
    let big = 4 * c as usize;
    let pref = prefactor(tw, c);
    let roots = unit_roots(big);
    let two_exp = c.trailing_zeros();
    let odd_c = c >> two_exp;
    let jac = jacobi_table(odd_c);
    let eps3 = i_pow(tw);
    let units: Vec<u64> = (0..big / 2).map(|j| 2 * j as u64 + 1).filter(|&nu| gcd(nu as i64, c as i64) == 1).collect();
    let invs = batch_inverse(&units, big as u64);
    let mm = m.rem_euclid(big as i64) as u64;
    let mut odd = vec![Complex64::new(0.0, 0.0); big / 2];
    // (4c/ν) = (2/ν)^e (c'/ν) with c = 2^e c', and
    // (c'/ν) = (ν/c')(−1)^{(c'−1)/2·(ν−1)/2}
    let c_three = odd_c % 4 == 3;
    for (&nu, &nub) in units.iter().zip(&invs) {
        let mut chi = jac[(nu % odd_c) as usize] as f64;
        if two_exp % 2 == 1 && (nu % 8 == 3 || nu % 8 == 5) {
            chi = -chi;
        }
        let eps = if nu % 4 == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            if c_three {
                chi = -chi;
            }
            eps3
        };
        odd[(nu / 2) as usize] = eps * chi * roots[(mm * nub % big as u64) as usize];
    }
    KloostermanRow { big, roots, odd, pref }
}

impl KloostermanRow {
    pub fn eval(&self, n: i64) -> Complex64 {
        let big = self.big;
        let n0 = n.rem_euclid(big as i64) as usize;
        let step = 2 * n0 % big;
        let mut idx = n0;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.odd {
            acc += a * self.roots[idx];
            idx += step;
            if idx >= big {
                idx -= big;
            }
        }
        self.pref * acc
    }
}
