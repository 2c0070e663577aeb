use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maasslift"));
    c.env_remove("MAASSLIFT_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn plus_basis_dimension() {
    let v = stdout_json(&run(&["basis", "--weight", "5", "--plus", "--horizon", "12"]));
    assert_eq!(v.as_array().unwrap().len(), 1);
}

#[test]
fn lift_zd_from_file_has_constant_48() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = run(&["basis", "--weight", "-4", "--principal", r#"{"-1": "1"}"#, "--horizon", "5"]);
    let v = stdout_json(&f1);
    let path = dir.path().join("F1.json");
    std::fs::write(&path, v[0].to_string()).unwrap();
    let out = stdout_json(&run(&["lift", "--kind", "zd", "--k", "2", "--d", "5", "--input", path.to_str().unwrap()]));
    let coeffs = out["exact"]["coeffs"].as_array().unwrap();
    let c0 = coeffs.iter().find(|c| c[0] == 0).unwrap();
    assert_eq!(c0[1], "48");
    assert_eq!(out["lift"], "Zd");
}

#[test]
fn emitted_series_round_trip() {
    let v = stdout_json(&run(&["basis", "--weight", "-1", "--principal", r#"{"-5": "1"}"#, "--horizon", "20"]));
    let s = maasslift::QSeries::from_json(&v[0].to_string()).unwrap();
    assert_eq!(s.to_json_value(), v[0]);
}

#[test]
fn duality_suite_csv() {
    let o = run(&["verify", "--suite", "duality", "--k", "2", "--max", "24", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,D,a(d,D),c(D,d)"));
    // d = 5, D = -4: a = -c
    let row = lines.find(|l| l.starts_with("5,-4,")).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[2], format!("-{}", cols[3]).replace("--", ""));
}

#[test]
fn hecke_on_cohen_style_input() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&run(&["basis", "--weight", "5", "--plus", "--horizon", "40"]));
    let path = dir.path().join("h.json");
    std::fs::write(&path, v[0].to_string()).unwrap();
    let t = stdout_json(&run(&["hecke", "--input", path.to_str().unwrap(), "--n", "2"]));
    // the weight 5/2 plus space is one-dimensional, so T(4) acts by 9
    let a = &v[0]["coeffs"].as_array().unwrap()[1];
    let b = t[0]["coeffs"].as_array().unwrap().iter().find(|c| c[0] == a[0]).unwrap();
    let an: i64 = a[1].as_str().unwrap().parse().unwrap();
    let bn: i64 = b[1].as_str().unwrap().parse().unwrap();
    assert_eq!(bn, 9 * an);
}

#[test]
fn trace_routes_agree() {
    let cm = stdout_json(&run(&["trace", "--d1", "5", "--d2", "-4", "--k", "2", "--route", "cm-values", "--coset-c-max", "128", "--tol", "1e-9"]));
    let ks = stdout_json(&run(&["trace", "--d1", "5", "--d2", "-4", "--k", "2", "--route", "kloosterman-series", "--kloosterman-c-max", "4000"]));
    let a = cm["value_re"].as_f64().unwrap();
    let b = ks["value_re"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-3 * a.abs(), "{a} vs {b}");
    assert_eq!(cm["spec"]["route"], "cm_values");
    assert!(cm["est_error"].is_number());
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["lift", "--kind", "zd", "--k", "2", "--d", "-4"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--weight", "5", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("conf");
    std::fs::write(&cfg, "format = csv\nhorizon = 8\n").unwrap();
    let o = bin()
        .env("MAASSLIFT_CONFIG", &cfg)
        .args(["basis", "--weight", "5", "--plus"])
        .output()
        .unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("part,exponent,numerator,denominator,re,im,err"));
    assert!(text.lines().all(|l| !l.starts_with("0,9,")));
    let o = bin().env("MAASSLIFT_CONFIG", &cfg).args(["basis", "--weight", "5", "--plus", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["horizon"], 8);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = bin().env("MAASSLIFT_CONFIG", &cfg).args(["basis", "--weight", "5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
