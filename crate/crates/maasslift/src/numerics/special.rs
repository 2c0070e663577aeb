//! Special functions in double precision: Γ, incomplete Γ, Bessel J and I
//! of real order, Gauss–Legendre nodes.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x not a nonpositive integer.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// log Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn is_nonpos_int(s: f64) -> bool {
    s <= 0.0 && s.fract() == 0.0
}

/// Upper incomplete gamma Γ(s; y) = ∫_y^∞ t^{s−1}e^{−t} dt, y > 0.
pub fn inc_gamma(s: f64, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Err(Error::Domain(format!("incomplete gamma needs y > 0, got {y}")));
    }
    if y >= 1.0 && y >= s + 1.0 || (s <= 0.0 && y >= 1.0) {
        return Ok(inc_gamma_cf(s, y));
    }
    if s > 0.0 {
        return Ok(gamma(s) - lower_gamma_series(s, y));
    }
    if is_nonpos_int(s) {
        return Err(Error::Domain(format!("incomplete gamma at s = {s} with small y is unsupported")));
    }
    // Γ(s; y) = (Γ(s+1; y) − y^s e^{−y}) / s, climbing until s > 0
    let n = (-s).floor() as usize + 1;
    let mut g = inc_gamma(s + n as f64, y)?;
    for j in (0..n).rev() {
        let sj = s + j as f64;
        g = (g - y.powf(sj) * (-y).exp()) / sj;
    }
    Ok(g)
}

fn lower_gamma_series(s: f64, y: f64) -> f64 {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..1000 {
        term *= y / (s + n as f64);
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (s * y.ln() - y).exp()
}

/// Modified Lentz evaluation of the continued fraction for Γ(s; y).
fn inc_gamma_cf(s: f64, y: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = y + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * y.ln() - y).exp() * h
}

fn check_order(nu: f64, x: f64) -> Result<()> {
    if nu < 0.0 || x < 0.0 || !nu.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel functions need nu >= 0, x >= 0 (got {nu}, {x})")));
    }
    Ok(())
}

/// I_ν(x) for ν ≥ 0, x ≥ 0.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_order(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x > 700.0 {
        return Err(Error::Domain(format!("I-Bessel argument {x} overflows")));
    }
    if x <= 60.0 {
        let h = 0.5 * x;
        let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
        let mut sum = term;
        let q = h * h;
        for k in 1..2000 {
            term *= q / (k as f64 * (k as f64 + nu));
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        return Ok(sum);
    }
    // asymptotic expansion, stopped at the smallest term
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() > term.abs() && k > 2 {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(x.exp() / (2.0 * PI * x).sqrt() * sum)
}

/// J_ν(x) for ν ≥ 0, x ≥ 0: power series for small x, otherwise Miller's
/// backward recurrence normalized by (x/2)^ν = Σ (ν+2j)Γ(ν+j)/j!·J_{ν+2j}(x).
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    check_order(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x < 4.0 {
        let h = 0.5 * x;
        let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
        let mut sum = term;
        let q = -h * h;
        for k in 1..200 {
            term *= q / (k as f64 * (k as f64 + nu));
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        return Ok(sum);
    }
    if x > 1e5 {
        return Err(Error::Domain(format!("J-Bessel argument {x} outside the supported range")));
    }
    let big_k = {
        let k = (x + 40.0 + 6.0 * x.sqrt()).ceil() as usize;
        k + (k % 2)
    };
    // weights w_j = (ν+2j)Γ(ν+j)/j!
    let weight = |j: usize, g: &mut f64| -> f64 {
        if nu == 0.0 {
            if j == 0 { 1.0 } else { 2.0 }
        } else {
            if j > 0 {
                *g *= (nu + j as f64 - 1.0) / j as f64;
            }
            (nu + 2.0 * j as f64) * *g
        }
    };
    let mut ws = Vec::with_capacity(big_k / 2 + 1);
    let mut g = if nu == 0.0 { 1.0 } else { gamma(nu) };
    for j in 0..=big_k / 2 {
        ws.push(weight(j, &mut g));
    }
    let mut f_next = 0.0; // f_{k+1}
    let mut f = 1e-30; // f_k
    let mut norm = ws[big_k / 2] * f;
    for k in (1..=big_k).rev() {
        let f_prev = 2.0 * (nu + k as f64) / x * f - f_next;
        f_next = f;
        f = f_prev;
        let idx = k - 1;
        if idx % 2 == 0 {
            norm += ws[idx / 2] * f;
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
        }
    }
    Ok(f * (nu * (0.5 * x).ln()).exp() / norm)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: Lazy<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(v) = CACHE.lock().get(&n) {
        return v.clone();
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    let v = Arc::new((xs, ws));
    CACHE.lock().insert(n, v.clone());
    v
}

/// ∫_a^b f by n-point Gauss–Legendre.
pub fn gl_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let gl = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    gl.0.iter().zip(&gl.1).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}
