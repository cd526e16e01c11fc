use std::path::PathBuf;
use std::process::Command;

use gauss_renyi::cli::run;
use gauss_renyi::io::{parse_number, round_sig};
use serde_json::Value;
use tempfile::TempDir;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let path: PathBuf = self.dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("gauss-renyi").chain(args.iter().copied()).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const THERMAL_LN2: &str = r#"{"thermal": [0.6931471805599453]}"#;
const THERMAL_LN4: &str = r#"{"thermal": [1.3862943611198906]}"#;
const VACUUM: &str = r#"{"n": 1, "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}"#;

#[test]
fn entropy_thermal_pair() {
    let f = Files::new();
    let rho = f.write("rho.json", THERMAL_LN2);
    let sigma = f.write("sigma.json", THERMAL_LN4);
    let (code, out, _) = call(&["entropy", "--alpha", "0.5", "--rho", &rho, "--sigma", &sigma]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["divergence"].as_f64().unwrap() - 0.108_299_916_535).abs() < 1e-12);
    for key in ["alpha", "divergence", "T_alpha", "trace_Z", "s", "t_Z", "p_s", "p_tZ", "p_alpha_tZ"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn positional_files_and_table_format() {
    let f = Files::new();
    let rho = f.write("rho.json", THERMAL_LN2);
    let sigma = f.write("sigma.json", THERMAL_LN4);
    let (code, out, _) = call(&["sweep", "--alphas", "0.3,0.5,0.7", &rho, &sigma, "--format", "table"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    assert!(out.contains("0.108299916535"));
}

#[test]
fn sweep_is_monotone_in_alpha() {
    let f = Files::new();
    let rho = f.write("rho.json", r#"{"coherent": [[1.0, 0.5]]}"#);
    let sigma = f.write("sigma.json", THERMAL_LN2);
    let (code, out, _) = call(&["sweep", "--alphas", "0.2,0.4,0.6,0.8", "--rho", &rho, "--sigma", &sigma]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let d: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["divergence"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(v[0]["t_Z"][0], Value::String("inf".into()));
}

#[test]
fn pure_sigma_is_rejected() {
    let f = Files::new();
    let rho = f.write("rho.json", THERMAL_LN2);
    let sigma = f.write("sigma.json", VACUUM);
    let (code, _, err) = call(&["entropy", "--alpha", "0.5", "--rho", &rho, "--sigma", &sigma]);
    assert_eq!(code, 2);
    assert!(err.contains("sigma must be faithful"), "{err}");
}

#[test]
fn alpha_outside_unit_interval_is_rejected() {
    let f = Files::new();
    let rho = f.write("rho.json", THERMAL_LN2);
    let sigma = f.write("sigma.json", THERMAL_LN4);
    for alpha in ["1.2", "1", "0", "-0.5"] {
        let (code, _, err) = call(&["entropy", "--alpha", alpha, "--rho", &rho, "--sigma", &sigma]);
        assert_eq!(code, 2, "alpha {alpha}");
        assert!(err.contains("0<alpha<1"), "{err}");
    }
    let (code, _, err) = call(&["sweep", "--alphas", "0.5,1.5", "--rho", &rho, "--sigma", &sigma]);
    assert_eq!(code, 2);
    assert!(err.contains("0<alpha<1"));
}

#[test]
fn malformed_input_exits_one() {
    let f = Files::new();
    let bad = f.write("bad.json", "{ not json");
    let sigma = f.write("sigma.json", THERMAL_LN4);
    let (code, _, _) = call(&["entropy", "--alpha", "0.5", "--rho", &bad, "--sigma", &sigma]);
    assert_eq!(code, 1);
    let missing = f.dir.path().join("missing.json");
    let (code, _, _) = call(&["williamson", missing.to_str().unwrap()]);
    assert_eq!(code, 1);
    let schema = f.write("schema.json", r#"{"mean": [0, 0]}"#);
    let (code, _, _) = call(&["williamson", &schema]);
    assert_eq!(code, 1);
}

#[test]
fn unphysical_state_exits_two() {
    let f = Files::new();
    let bad = f.write("bad.json", r#"{"n": 1, "mean": [0, 0], "cov": [[0.25, 0], [0, 0.25]]}"#);
    let (code, _, err) = call(&["williamson", &bad]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn williamson_examples() {
    let f = Files::new();
    let vac = f.write("vac.json", VACUUM);
    let (code, out, _) = call(&["williamson", &vac]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"][0].as_f64().unwrap(), 0.5);
    assert_eq!(v["t"][0], Value::String("inf".into()));

    let th = f.write("th.json", THERMAL_LN2);
    let (code, out, _) = call(&["williamson", "--rho", &th]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["d"][0].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((v["t"][0].as_f64().unwrap() - 2f64.ln()).abs() < 1e-11);
}

#[test]
fn convert_round_trips_through_quadruple_file() {
    let f = Files::new();
    let state = f.write(
        "state.json",
        r#"{"n": 1, "mean": [0.3, -0.2], "cov": [[1.1, 0.2], [0.2, 0.6]]}"#,
    );
    let (code, out, _) = call(&["convert", &state]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["trace"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let quad = f.write("quad.json", &v["quadruple"].to_string());
    let (code, out, _) = call(&["convert", &quad]);
    assert_eq!(code, 0);
    let back: Value = serde_json::from_str(&out).unwrap();
    let cov = &back["state"]["cov"];
    assert!((cov[0][0].as_f64().unwrap() - 1.1).abs() < 1e-10);
    assert!((cov[0][1].as_f64().unwrap() - 0.2).abs() < 1e-10);
    assert!((back["state"]["mean"][1].as_f64().unwrap() + 0.2).abs() < 1e-10);
}

#[test]
fn convert_reads_its_own_output() {
    let f = Files::new();
    let (_, out, _) = call(&["convert", &f.write("s.json", r#"{"squeezed_vacuum": 0.3}"#)]);
    let (code, out, _) = call(&["convert", &f.write("q.json", &out)]);
    assert_eq!(code, 0);
    let (code, out, _) = call(&["convert", &f.write("back.json", &out)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.get("quadruple").is_some());
}

#[test]
fn verify_small_cutoff_reports_non_convergence() {
    let (code, out, err) = call(&["verify", "--suite", "thermal", "--verify-cutoff", "8", "--format", "table"]);
    assert_eq!(code, 2);
    assert!(out.contains("cutoff not converged"), "{out}");
    assert!(!out.contains("FAIL"));
    assert!(err.contains("cutoff not converged"));
}

#[test]
fn verify_one_mode_suite_passes() {
    let (code, out, _) = call(&["verify", "--suite", "thermal,one-mode"]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.as_array().unwrap().iter().all(|o| o["status"] == "pass"));
}

#[test]
fn verify_user_files() {
    let f = Files::new();
    let rho = f.write("rho.json", r#"{"coherent": [[0.8, -0.3]]}"#);
    let sigma = f.write("sigma.json", THERMAL_LN2);
    let (code, out, _) = call(&["verify", "--rho", &rho, "--sigma", &sigma, "--alphas", "0.4,0.6"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn empty_suite_exits_two() {
    let (code, _, err) = call(&["verify", "--suite", ""]);
    assert_eq!(code, 2);
    assert!(err.contains("empty"));
    let (code, _, _) = call(&["verify", "--suite", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["bogus"]).0, 2);
    assert_eq!(call(&["entropy", "--alpha", "x"]).0, 2);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("entropy"));
}

/// Recomputing the divergence from the printed `T_alpha` reproduces the
/// printed divergence up to the error that 12-digit rounding of `T_alpha` induces.
#[test]
fn printed_report_is_self_consistent() {
    let f = Files::new();
    let rho = f.write("rho.json", r#"{"coherent": [[1.3, 0.2]]}"#);
    let sigma = f.write("sigma.json", r#"{"thermal": [0.9]}"#);
    let alphas = "0.05,0.1,0.25,0.5,0.75,0.9,0.99";
    let (code, out, _) = call(&["sweep", "--alphas", alphas, "--rho", &rho, "--sigma", &sigma]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    for r in v.as_array().unwrap() {
        let alpha = r["alpha"].as_f64().unwrap();
        let t = parse_number(&r["T_alpha"]).unwrap();
        let d = parse_number(&r["divergence"]).unwrap();
        assert_eq!(round_sig(d), d, "divergence printed beyond 12 digits");
        let recomputed = t.ln() / (alpha - 1.0);
        let bound = 5e-12 / (1.0 - alpha) + 5e-12 * d.abs();
        assert!((round_sig(recomputed) - d).abs() <= bound, "alpha {alpha}: {recomputed} vs {d}");
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gauss-renyi"))
}

#[test]
fn binary_exit_codes() {
    let f = Files::new();
    let rho = f.write("rho.json", THERMAL_LN2);
    let sigma = f.write("sigma.json", THERMAL_LN4);
    let ok = binary()
        .args(["entropy", "--alpha", "0.5", "--rho", &rho, "--sigma", &sigma])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = binary().args(["williamson", "/nonexistent/state.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let domain = binary()
        .args(["entropy", "--alpha", "2", "--rho", &rho, "--sigma", &sigma])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&domain.stderr).lines().count(), 1);
}

#[test]
fn tolerance_override_from_environment() {
    let strict = binary()
        .args(["verify", "--suite", "one-mode", "--verify-cutoff", "30"])
        .env("GAUSS_RENYI_TOL", "1e-15")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(2));
    let loose = binary()
        .args(["verify", "--suite", "one-mode", "--verify-cutoff", "30"])
        .env("GAUSS_RENYI_TOL", "1e-2")
        .output()
        .unwrap();
    assert_eq!(loose.status.code(), Some(0), "{}", String::from_utf8_lossy(&loose.stdout));
    let garbage = binary()
        .args(["verify", "--suite", "thermal"])
        .env("GAUSS_RENYI_TOL", "lots")
        .output()
        .unwrap();
    assert_eq!(garbage.status.code(), Some(2));
}
