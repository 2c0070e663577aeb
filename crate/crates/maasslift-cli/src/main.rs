mod config;
mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maasslift::hecke::hecke_composite;
use maasslift::lifts::{
    fractional_derivative, shintani_cusp, shintani_weak, zagier_big_d, zagier_big_d_principal, zagier_small_d,
    HarmonicModel, LiftResult, NonholoRoute,
};
use maasslift::numerics::{poincare_normalized_coeffs, EvalReport, NumBudget};
use maasslift::qseries::{
    parse_rat, plus_allowed, plus_space_basis, principal_from, weakly_holo_integral, weakly_holo_plus_affine,
};
use maasslift::traces::{modified_trace, modified_trace_tilde};
use maasslift::{Error, QSeries};
use serde_json::json;

use config::{Config, Format};

#[derive(Parser)]
#[command(name = "maasslift", version, about = "Zagier and Shintani lifts, traces and their verification")]
struct Cli {
    /// key=value config file (default: $MAASSLIFT_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
    #[arg(long, global = true)]
    horizon: Option<i64>,
    #[arg(long, global = true)]
    kloosterman_c_max: Option<u64>,
    #[arg(long, global = true)]
    coset_c_max: Option<u64>,
    #[arg(long, global = true)]
    series_terms: Option<u64>,
    #[arg(long, global = true)]
    quad_depth: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact bases and weakly holomorphic forms with a given principal part
    Basis {
        /// twice the weight
        #[arg(long, allow_hyphen_values = true)]
        weight: i32,
        /// Kohnen plus space on Γ₀(4) (implied for odd twice-weights)
        #[arg(long)]
        plus: bool,
        /// JSON object {"exponent": "coefficient", ...}
        #[arg(long)]
        principal: Option<String>,
    },
    /// Zagier lifts 𝔷_d, 𝔷_D, the fractional derivative and Shintani lifts
    Lift(LiftArgs),
    /// Modified trace Tr*_{d1,d2} of F_m (or of --input)
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        d1: i64,
        #[arg(long, allow_hyphen_values = true)]
        d2: i64,
        #[arg(long)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, value_enum, default_value_t = Route::CmValues)]
        route: Route,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// T(n) in integral weight, T(n²) in half-integral weight
    Hecke {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Run a verification suite; exits 1 when a check fails
    Verify {
        #[arg(long, value_parser = verify::SUITES)]
        suite: String,
        #[arg(long)]
        k: Option<i64>,
        /// discriminant bound, or horizon for hecke-equivariance
        #[arg(long, default_value_t = 40)]
        max: i64,
    },
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    k: i64,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
    #[arg(long = "D", allow_hyphen_values = true)]
    big_d: Option<i64>,
    /// QSeries JSON input; F_m is used when absent
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    m: i64,
    /// how c⁻ of 𝔷_d is computed when the input has a shadow
    #[arg(long, value_enum, default_value_t = NonholoArg::Shadow)]
    nonholo: NonholoArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Zd,
    #[value(name = "zD")]
    ZBigD,
    Dd,
    Shintani,
    ShintaniWeak,
}

#[derive(Clone, Copy, ValueEnum)]
enum NonholoArg {
    Shadow,
    Cycle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    CmValues,
    CycleIntegrals,
    KloostermanSeries,
}

/// Failure that maps to exit code 1 rather than 2.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli.config.clone().or_else(|| std::env::var_os("MAASSLIFT_CONFIG").map(PathBuf::from));
    let mut c = match path {
        Some(p) => Config::load(&p)?,
        None => Config::default(),
    };
    if let Some(f) = &cli.format {
        c.format = f.parse()?;
    }
    if let Some(h) = cli.horizon {
        c.horizon = h;
    }
    let b = &mut c.budget;
    b.kloosterman_c_max = cli.kloosterman_c_max.unwrap_or(b.kloosterman_c_max);
    b.coset_c_max = cli.coset_c_max.unwrap_or(b.coset_c_max);
    b.series_terms = cli.series_terms.unwrap_or(b.series_terms);
    b.quad_depth = cli.quad_depth.unwrap_or(b.quad_depth);
    b.tol = cli.tol.unwrap_or(b.tol);
    c.validate()?;
    Ok(c)
}

fn read_series(path: &PathBuf) -> Result<QSeries> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(QSeries::from_json(&text)?)
}

fn series_csv(rows: &mut String, tag: &str, s: &QSeries) {
    for (e, c) in s.terms() {
        rows.push_str(&format!("{tag},{e},{},{},,,\n", c.numer(), c.denom()));
    }
}

fn report_csv(rows: &mut String, tag: &str, m: &BTreeMap<i64, EvalReport>) {
    for (e, r) in m {
        rows.push_str(&format!("{tag},{e},,,{:e},{:e},{:e}\n", r.value.re, r.value.im, r.est_error));
    }
}

const CSV_HEADER: &str = "part,exponent,numerator,denominator,re,im,err\n";

fn emit_series(list: &[QSeries], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&list.iter().map(QSeries::to_json_value).collect::<Vec<_>>())
            .expect("json"),
        Format::Csv => {
            let mut s = CSV_HEADER.to_string();
            for (i, q) in list.iter().enumerate() {
                series_csv(&mut s, &i.to_string(), q);
            }
            s
        }
    }
}

fn emit_lift(r: &LiftResult, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&r.to_json_value()).expect("json"),
        Format::Csv => {
            let mut s = CSV_HEADER.to_string();
            if let Some(e) = &r.exact {
                series_csv(&mut s, "exact", e);
            }
            if let Some(n) = &r.numeric {
                report_csv(&mut s, "numeric", n);
            }
            if let Some(n) = &r.nonholomorphic {
                let neg: BTreeMap<i64, EvalReport> = n.iter().map(|(k, v)| (-k, v.clone())).collect();
                report_csv(&mut s, "nonholomorphic", &neg);
            }
            s
        }
    }
}

fn parse_principal(text: &str) -> Result<maasslift::PrincipalPart> {
    let v: serde_json::Value = serde_json::from_str(text).context("principal part must be a JSON object")?;
    let obj = v.as_object().context("principal part must be a JSON object")?;
    let mut items = Vec::new();
    for (e, c) in obj {
        let e: i64 = e.parse().with_context(|| format!("bad exponent '{e}'"))?;
        let c = match c {
            serde_json::Value::String(s) => parse_rat(s)?,
            serde_json::Value::Number(n) => parse_rat(&n.to_string())?,
            _ => bail!("coefficient for {e} must be a string or integer"),
        };
        items.push((e, c));
    }
    Ok(principal_from(items)?)
}

/// Builds at the smallest horizon the construction accepts, then truncates to `h`.
fn basis(weight: i32, plus: bool, principal: Option<&str>, h: i64) -> Result<Vec<QSeries>> {
    let mut build_h = h;
    loop {
        match basis_at(weight, plus, principal, build_h) {
            Err(e) => match e.downcast_ref::<maasslift::Error>() {
                Some(maasslift::Error::Horizon { needed, .. }) if *needed > build_h => build_h = *needed,
                _ => return Err(e),
            },
            Ok(list) if build_h == h => return Ok(list),
            Ok(list) => return list.iter().map(|f| Ok(f.truncate(h)?)).collect(),
        }
    }
}

fn basis_at(weight: i32, plus: bool, principal: Option<&str>, h: i64) -> Result<Vec<QSeries>> {
    let odd = weight % 2 != 0;
    if plus && !odd {
        bail!("the plus space needs an odd twice-weight");
    }
    match principal {
        None if odd => Ok(plus_space_basis(weight, h)?),
        None => bail!("integral weight needs --principal (weakly holomorphic forms of weight 2-2k)"),
        Some(p) => {
            let pp = parse_principal(p)?;
            if odd {
                let (f, cusp) = weakly_holo_plus_affine(weight, &pp, h)?;
                Ok(std::iter::once(f).chain(cusp).collect())
            } else {
                if weight % 4 != 0 || weight > 0 {
                    bail!("integral weight must be 2-2k <= 0 (twice-weight a multiple of 4)");
                }
                let two_k = 2 - (weight / 2) as i64;
                let items: Vec<_> = pp.0.into_iter().collect();
                Ok(vec![weakly_holo_integral(two_k, &items, h)?])
            }
        }
    }
}

fn model(k: i64, m: i64, input: Option<&PathBuf>, cfg: &Config) -> Result<HarmonicModel> {
    if let Some(p) = input {
        return Ok(HarmonicModel::weakly_holomorphic(read_series(p)?, k)?);
    }
    if matches!(k, 2..=5 | 7) {
        return Ok(HarmonicModel::basis(k, m, 1)?);
    }
    if m != 1 {
        bail!("with cusp forms present only F_1 is modelled (use --m 1)");
    }
    Ok(HarmonicModel::basis_one_cusp(k, &cfg.budget)?)
}

fn need(v: Option<i64>, name: &str) -> Result<i64> {
    v.with_context(|| format!("--{name} is required for this lift"))
}

fn lift(a: &LiftArgs, cfg: &Config) -> Result<LiftResult> {
    let h = cfg.horizon;
    let b = Some(&cfg.budget);
    let k = a.k;
    let route = match a.nonholo {
        NonholoArg::Shadow => NonholoRoute::Shadow,
        NonholoArg::Cycle => NonholoRoute::Cycle,
    };
    Ok(match a.kind {
        Kind::Zd => zagier_small_d(&model(k, a.m, a.input.as_ref(), cfg)?, need(a.d, "d")?, h, b, route)?,
        Kind::ZBigD => zagier_big_d(&model(k, a.m, a.input.as_ref(), cfg)?, need(a.big_d, "D")?, h, b)?,
        Kind::Dd => {
            let g = read_series(a.input.as_ref().context("--input is required for dd")?)?;
            fractional_derivative(&g, need(a.d, "d")?, need(a.big_d, "D")?, k, h, b)?
        }
        Kind::Shintani => {
            let f = read_series(a.input.as_ref().context("--input is required for shintani")?)?;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let deltas: Vec<i64> = (1..=h).filter(|&n| plus_allowed((2 * k + 1) as i32, n)).map(|n| sign * n).collect();
            shintani_cusp(&f, need(a.d, "d")?, &deltas, &cfg.budget)?
        }
        Kind::ShintaniWeak => {
            let f = read_series(a.input.as_ref().context("--input is required for shintani-weak")?)?;
            shintani_weak(&f, need(a.d, "d")?, need(a.big_d, "D")?, h, b)?
        }
    })
}

/// Tr*_{d,D} = coefficient of 𝔷_D(M) at q^{|d|}, summed from Poincaré series.
fn trace_kloosterman(model: &HarmonicModel, d1: i64, d2: i64, k: i64, budget: &NumBudget) -> Result<EvalReport> {
    let s = if k % 2 == 0 { 1 } else { -1 };
    let (d, big_d, sign) = if d2 * s < 0 { (d1, d2, 1.0) } else { (d2, d1, -1.0) };
    if d * s <= 0 {
        bail!("need one discriminant of each sign class");
    }
    let pp = zagier_big_d_principal(&model.principal_terms(), big_d, k)?;
    let mut acc = EvalReport::real(0.0, 0.0, *budget);
    for (e, c) in &pp.0 {
        let r = poincare_normalized_coeffs(*e, (2 * k + 1) as i32, &[d.abs()], budget)?.remove(0);
        acc = acc.plus(&r.scale(maasslift::arith::to_f64(c)));
    }
    Ok(acc.scale(sign))
}

fn run(cli: &Cli) -> Result<String> {
    let cfg = load_config(cli)?;
    match &cli.cmd {
        Cmd::Basis { weight, plus, principal } => {
            Ok(emit_series(&basis(*weight, *plus, principal.as_deref(), cfg.horizon)?, cfg.format))
        }
        Cmd::Lift(a) => Ok(emit_lift(&lift(a, &cfg)?, cfg.format)),
        Cmd::Trace { d1, d2, k, m, route, input } => {
            let mdl = model(*k, *m, input.as_ref(), &cfg)?;
            let (name, rep) = match route {
                Route::CmValues => ("cm_values", modified_trace(&mdl, *d1, *d2, *k, &cfg.budget)?),
                Route::CycleIntegrals => ("cycle_integrals", modified_trace_tilde(&mdl, *d1, *d2, *k, &cfg.budget)?),
                Route::KloostermanSeries => {
                    ("kloosterman_series", trace_kloosterman(&mdl, *d1, *d2, *k, &cfg.budget)?)
                }
            };
            let spec = json!({"d1": d1, "d2": d2, "k": k, "m": m, "route": name});
            Ok(match cfg.format {
                Format::Json => {
                    let mut v = rep.to_json_value();
                    v["spec"] = spec;
                    serde_json::to_string_pretty(&v)?
                }
                Format::Csv => format!(
                    "d1,d2,k,m,route,re,im,err\n{d1},{d2},{k},{m},{name},{:e},{:e},{:e}\n",
                    rep.value.re, rep.value.im, rep.est_error
                ),
            })
        }
        Cmd::Hecke { input, n } => Ok(emit_series(&[hecke_composite(&read_series(input)?, *n)?], cfg.format)),
        Cmd::Verify { suite, k, max } => {
            let rep = verify::run(suite, *k, *max, &cfg.budget)?;
            let out = match cfg.format {
                Format::Json => serde_json::to_string_pretty(&rep.to_json())?,
                Format::Csv => rep.to_csv(),
            };
            if rep.passed() {
                Ok(out)
            } else {
                print!("{out}");
                let report = json!({"suite": suite, "passed": false, "failures": rep.failures});
                Err(CheckFailed(report.to_string()).into())
            }
        }
    }
}

/// Library errors about the input map to 2, budget exhaustion and failed
/// checks to 1.
fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Budget(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            if !out.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
