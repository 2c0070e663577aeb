//! Verification suites behind `maasslift verify`.

use std::f64::consts::PI;

use anyhow::{bail, Result};
use maasslift::arith::{
    divisor_sum, fundamental_discriminants, is_square, l_value_neg, rint, to_f64, zeta_neg, Rational,
};
use maasslift::hecke::{hecke_half, hecke_integral, required_horizon};
use maasslift::lifts::{
    eigenform_defect, find_eigenvalue, one_dim_eigenform, shintani_cusp, zagier_big_d, zagier_d_constant,
    zagier_small_d, HarmonicModel, NonholoRoute,
};
use maasslift::numerics::{gamma, petersson_norm_sq, NumBudget};
use maasslift::qseries::{
    cohen_eisenstein, fmt_rat, plus_allowed, unit_principal, weakly_holo_integral_basis, weakly_holo_plus_affine,
    weakly_holo_plus_basis,
};
use maasslift::traces::{cycle_trace, CycleVariant, NieburEvaluator, SeriesEvaluator};
use maasslift::PrincipalPart;
use rayon::prelude::*;
use serde_json::json;

pub const SUITES: [&str; 6] =
    ["duality", "constant-term", "hecke-equivariance", "thm1", "shintani-proportionality", "eigenform"];

pub struct Report {
    pub suite: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failures: Vec<String>,
}

impl Report {
    fn new(suite: &str, columns: Vec<&'static str>) -> Self {
        Report { suite: suite.into(), columns, rows: Vec::new(), failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.suite,
            "passed": self.passed(),
            "columns": self.columns,
            "rows": self.rows,
            "failures": self.failures,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

fn sgn_k(k: i64) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn cuspless(k: i64) -> bool {
    matches!(k, 2..=5 | 7)
}

fn small_ds(k: i64, bound: i64) -> Vec<i64> {
    fundamental_discriminants(-bound, bound).into_iter().filter(|d| d * sgn_k(k) > 0).collect()
}

pub fn run(suite: &str, k: Option<i64>, max: i64, budget: &NumBudget) -> Result<Report> {
    match suite {
        "duality" => duality(k.unwrap_or(2), max),
        "constant-term" => constant_term(k.unwrap_or(2), max),
        "hecke-equivariance" => hecke_equivariance(k.unwrap_or(2), max),
        "thm1" => thm1(k.unwrap_or(6), budget),
        "shintani-proportionality" => shintani_proportionality(k.unwrap_or(6), budget),
        "eigenform" => eigenform(k.unwrap_or(2)),
        _ => bail!("unknown suite '{suite}' (one of {})", SUITES.join(", ")),
    }
}

fn need_cuspless(k: i64) -> Result<()> {
    if !cuspless(k) {
        bail!("this suite is exact and needs S_2k = 0, i.e. k in {{2,3,4,5,7}}");
    }
    Ok(())
}

fn duality(k: i64, max: i64) -> Result<Report> {
    need_cuspless(k)?;
    let mut rep = Report::new("duality", vec!["d", "D", "a(d,D)", "c(D,d)"]);
    let f1 = HarmonicModel::basis(k, 1, 1)?;
    let ds = small_ds(k, max);
    let big = small_ds(k + 1, max);
    let gd = ds
        .par_iter()
        .map(|&d| Ok(zagier_small_d(&f1, d, max, None, NonholoRoute::Shadow)?.exact.expect("exact regime")))
        .collect::<Result<Vec<_>>>()?;
    let hd = big
        .par_iter()
        .map(|&bd| Ok(zagier_big_d(&f1, bd, max, None)?.exact.expect("exact regime")))
        .collect::<Result<Vec<_>>>()?;
    for (d, g) in ds.iter().zip(&gd) {
        for (bd, h) in big.iter().zip(&hd) {
            let a = g.coeff(bd.abs())?;
            let c = h.coeff(d.abs())?;
            if a != -c.clone() {
                rep.failures.push(format!("d={d} D={bd}: a={} c={}", fmt_rat(&a), fmt_rat(&c)));
            }
            rep.rows.push(vec![d.to_string(), bd.to_string(), fmt_rat(&a), fmt_rat(&c)]);
        }
    }
    Ok(rep)
}

fn constant_term(k: i64, max: i64) -> Result<Report> {
    need_cuspless(k)?;
    let mut rep = Report::new("constant-term", vec!["m", "d", "constant", "-L_d(1-k)sigma(m)/zeta(1-2k)"]);
    let zeta = zeta_neg((2 * k) as usize);
    for m in 1..=6 {
        let fm = HarmonicModel::basis(k, m, 1)?;
        let sigma = Rational::from_integer(divisor_sum(m as u64, (2 * k - 1) as u32));
        for d in small_ds(k, max) {
            let formula = -l_value_neg(d, k as usize)? / zeta.clone() * sigma.clone();
            let c0 = zagier_small_d(&fm, d, 0, None, NonholoRoute::Shadow)?.exact.expect("exact regime").coeff(0)?;
            if c0 != formula || c0 != zagier_d_constant(&fm, d)? {
                rep.failures.push(format!("m={m} d={d}"));
            }
            rep.rows.push(vec![m.to_string(), d.to_string(), fmt_rat(&c0), fmt_rat(&formula)]);
        }
    }
    Ok(rep)
}

fn hecke_equivariance(k: i64, h: i64) -> Result<Report> {
    need_cuspless(k)?;
    let mut rep = Report::new("hecke-equivariance", vec!["lift", "m", "p", "disc", "agrees"]);
    let ds = small_ds(k, 8);
    let bds = small_ds(k + 1, 8);
    for m in [1i64, 2] {
        for p in [2u64, 3, 5] {
            let tw = 2 * (2 - 2 * k) as i32;
            let fm = weakly_holo_integral_basis(2 * k, m, required_horizon(tw, p, 1))?;
            let fmt = HarmonicModel::weakly_holomorphic(hecke_integral(&fm, p)?, k)?;
            let fm = HarmonicModel::weakly_holomorphic(fm, k)?;
            for &d in ds.iter().take(2) {
                let lhs = zagier_small_d(&fmt, d, h, None, NonholoRoute::Shadow)?.exact.expect("exact regime");
                let z = zagier_small_d(&fm, d, required_horizon((3 - 2 * k) as i32, p, h), None, NonholoRoute::Shadow)?;
                let ok = lhs.agrees_to(&hecke_half(&z.exact.expect("exact regime"), p)?, h)?;
                if !ok {
                    rep.failures.push(format!("Zd m={m} p={p} d={d}"));
                }
                rep.rows.push(vec!["Zd".into(), m.to_string(), p.to_string(), d.to_string(), ok.to_string()]);
            }
            for &bd in bds.iter().take(2) {
                let lhs = zagier_big_d(&fmt, bd, h, None)?.exact.expect("exact regime");
                let z = zagier_big_d(&fm, bd, required_horizon((2 * k + 1) as i32, p, h), None)?;
                let ok = lhs.agrees_to(&hecke_half(&z.exact.expect("exact regime"), p)?, h)?;
                if !ok {
                    rep.failures.push(format!("ZD m={m} p={p} D={bd}"));
                }
                rep.rows.push(vec!["ZD".into(), m.to_string(), p.to_string(), bd.to_string(), ok.to_string()]);
            }
        }
    }
    Ok(rep)
}

/// (d, δ) pairs with δd a non-square, both of sign (−1)^k.
fn thm1_pairs(k: i64) -> Vec<(i64, i64)> {
    if k % 2 == 0 {
        vec![(5, 8), (5, 12), (1, 5)]
    } else {
        vec![(-3, -4), (-4, -7), (-3, -8)]
    }
}

fn thm1(k: i64, budget: &NumBudget) -> Result<Report> {
    let mut rep = Report::new("thm1", vec!["d", "delta", "lhs", "rhs", "ratio", "est_error"]);
    let kf = k as f64;
    let b = NumBudget { tol: budget.tol.min(1e-12), coset_c_max: budget.coset_c_max.min(24), ..*budget };
    let f = one_dim_eigenform(2 * k, 40)?;
    let norm = petersson_norm_sq(&f, &b)?;
    let ck = -3.0 * gamma((kf + 1.0) / 2.0) / (2f64.powf(kf - 1.0) * gamma(kf - 0.5) * gamma(kf / 2.0));
    let ev = SeriesEvaluator::scaled(&f, 1.0 / norm.value.re)?;
    let nv = NieburEvaluator { m: -1, s: kf, scale: (4.0 * PI).powf(kf - 1.0) };
    for (d, dl) in thm1_pairs(k) {
        let l = cycle_trace(&ev, dl, d, k, CycleVariant::Plain, &b)?;
        let r = cycle_trace(&nv, dl, d, k, CycleVariant::Plain, &b)?;
        let rhs = r.value.re * ck;
        let err = l.est_error + norm.est_error / norm.value.re * l.value.norm() + r.est_error * ck.abs();
        let rel = (l.value.re - rhs).abs() / rhs.abs();
        if rel > 1e-3 + err / rhs.abs() {
            rep.failures.push(format!("d={d} delta={dl}: ratio {:.6}", l.value.re / rhs));
        }
        rep.rows.push(vec![
            d.to_string(),
            dl.to_string(),
            format!("{:e}", l.value.re),
            format!("{rhs:e}"),
            format!("{:.6}", l.value.re / rhs),
            format!("{err:e}"),
        ]);
    }
    Ok(rep)
}

fn shintani_proportionality(k: i64, budget: &NumBudget) -> Result<Report> {
    let mut rep = Report::new("shintani-proportionality", vec!["delta", "shintani", "eigenform", "normalized_ratio"]);
    let b = NumBudget { tol: budget.tol.min(1e-12), ..*budget };
    let f = one_dim_eigenform(2 * k, 40)?;
    let tw = (2 * k + 1) as i32;
    let d: i64 = if k % 2 == 0 { 1 } else { -3 };
    let deltas: Vec<i64> = (1..=16)
        .filter(|&n| plus_allowed(tw, n) && !is_square(n * d.abs()))
        .map(|n| sgn_k(k) * n)
        .take(3)
        .collect();
    let lift = shintani_cusp(&f, d, &deltas, &b)?;
    let num = lift.numeric.unwrap_or_default();
    let (_, cusp) = weakly_holo_plus_affine(tw, &PrincipalPart::new(), 20)?;
    let Some(g) = cusp.first() else { bail!("no cusp form in weight {tw}/2") };
    let n0 = deltas[0].abs();
    for dl in &deltas {
        let n = dl.abs();
        let ratio = (num[&n].value.re / num[&n0].value.re) / (to_f64(&g.coeff(n)?) / to_f64(&g.coeff(n0)?));
        if (ratio - 1.0).abs() > 1e-3 {
            rep.failures.push(format!("delta={dl}: normalized ratio {ratio}"));
        }
        rep.rows.push(vec![dl.to_string(), format!("{:e}", num[&n].value.re), fmt_rat(&g.coeff(n)?), format!("{ratio:.9}")]);
    }
    Ok(rep)
}

fn eigenform(k: i64) -> Result<Report> {
    if k != 2 {
        bail!("the eigenform suite covers k = 2, D = -4");
    }
    let mut rep = Report::new("eigenform", vec!["p", "lambda", "in_JD", "cohen_eigenvalue"]);
    let f = weakly_holo_plus_basis(5, &unit_principal(-4)?, 4 * 9 * 12)?;
    let cohen = cohen_eisenstein(2, 4 * 9 * 12)?;
    for p in [2u64, 3] {
        let want = rint(1 + (p * p * p) as i64);
        let lam = find_eigenvalue(&f, -4, p)?;
        let member = match &lam {
            Some(l) => eigenform_defect(&f, -4, p, l)?.member_of_jd,
            None => false,
        };
        let th = hecke_half(&cohen, p)?;
        let cohen_ok = th.agrees_to(&cohen.truncate(th.horizon())?.scale(&want), th.horizon())?;
        if lam.as_ref() != Some(&want) || !member || !cohen_ok {
            rep.failures.push(format!("p={p}"));
        }
        let shown = lam.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into());
        rep.rows.push(vec![p.to_string(), shown, member.to_string(), cohen_ok.to_string()]);
    }
    Ok(rep)
}
