use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn opnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opnorm")).args(args).env_remove("OPNORM_SEED").output().expect("the binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mu_window_of_the_column_row_identity() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"left":"column:2","right":"row:2","coeffs":[[1,0],[0,1]]}"#);
    let cert = dir.path().join("cert.json");
    let v = stdout_json(&opnorm(&["mu", "window", s(&t), "--certificate", s(&cert)]));
    assert!((v["lower"].as_f64().unwrap() - 1.0).abs() <= 1e-9, "{v}");
    assert!(v["upper"].as_f64().unwrap() <= 1.001, "{v}");
    assert_eq!(v["certificate_path"], s(&cert));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["kind"], "split");
}

#[test]
fn norms_of_a_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"left":"row:2","right":"column:2","coeffs":[[1,0],[0,1]]}"#);
    let h = stdout_json(&opnorm(&["norm", "h", s(&t), "--restarts", "24", "--seed", "0"]));
    assert_eq!(h["bound_kind"], "upper");
    assert!((h["value"].as_f64().unwrap() - 2.0).abs() < 1e-2);
    assert_eq!(h["seed"], 0);
    assert!(h["certificate_path"].is_null());
    let m = stdout_json(&opnorm(&["norm", "min", s(&t)]));
    assert_eq!(m["bound_kind"], "exact");
    assert!((m["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let up = stdout_json(&opnorm(&["mu", "upper", s(&t)]));
    let lo = stdout_json(&opnorm(&["mu", "lower", s(&t)]));
    assert_eq!(lo["bound_kind"], "lower");
    assert!(lo["value"].as_f64().unwrap() <= up["value"].as_f64().unwrap() + 1e-6);

    let t3 = write(dir.path(), "t3.json", r#"{"spaces":["column:2","scalar","row:2"],"coeffs":[[[1,0]],[[0,1]]]}"#);
    let h3 = stdout_json(&opnorm(&["norm", "h3", s(&t3)]));
    assert!((h3["value"].as_f64().unwrap() - 1.0).abs() <= 1e-3);
}

#[test]
fn maps_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let u = write(dir.path(), "u.json", r#"{"domain":"row:2","codomain":"column:2","coeffs":[[1,0],[0,1]]}"#);
    let cb = stdout_json(&opnorm(&["norm", "cb", s(&u)]));
    assert!((cb["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert_eq!(cb["bound_kind"], "exact");
    let level = stdout_json(&opnorm(&["norm", "cb", s(&u), "--level", "1"]));
    assert!((level["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let id = write(dir.path(), "id.json", r#"{"domain":"rowcap:2","codomain":"rowcap:2","coeffs":[[1,0],[0,1]]}"#);
    let cert = dir.path().join("f.json");
    let row = stdout_json(&opnorm(&["gamma", "row", s(&id), "--certificate", s(&cert)]));
    let column = stdout_json(&opnorm(&["gamma", "column", s(&id)]));
    let split = stdout_json(&opnorm(&["gamma", "split", s(&id)]));
    let split = split["value"].as_f64().unwrap();
    assert!(split <= row["value"].as_f64().unwrap().min(column["value"].as_f64().unwrap()) + 1e-9);
    assert!(split >= 1.0 - 1e-9);
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c["kind"], "factorization");

    let m = write(dir.path(), "m.json", "[[1,0,0],[0,1,0],[0,0,1]]");
    let g = stdout_json(&opnorm(&["gamma2", s(&m)]));
    assert!((g["value"].as_f64().unwrap() - 3f64.sqrt()).abs() < 5e-2);
    let complex = write(dir.path(), "c.json", "[[[1,1],0],[0,1]]");
    assert_eq!(opnorm(&["gamma2", s(&complex)]).status.code(), Some(2));
}

#[test]
fn space_windows_and_block_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let w = stdout_json(&opnorm(&["mu", "space", "row:2"]));
    assert!(w["upper"].as_f64().unwrap() <= 1.0 + 1e-2);
    let explicit = write(dir.path(), "e.json", r#"{"label":"row","ambient":[1,2],"basis":[[1,0],[0,1]]}"#);
    let we = stdout_json(&opnorm(&["mu", "space", s(&explicit)]));
    assert!((we["upper"].as_f64().unwrap() - w["upper"].as_f64().unwrap()).abs() < 1e-6);

    let q = write(
        dir.path(),
        "q.json",
        r#"{
          "alpha1": {"domain":"scalar","codomain":"full:2x2","coeffs":[[0],[1],[0],[0]]},
          "alpha2": {"domain":"scalar","codomain":"full:2x2","coeffs":[[0],[0],[1],[0]]},
          "beta1":  {"domain":"scalar","codomain":"full:2x2","coeffs":[[1],[0],[0],[0]]},
          "beta2":  {"domain":"scalar","codomain":"full:2x2","coeffs":[[1],[0],[0],[0]]}
        }"#,
    );
    let cert = dir.path().join("pair.json");
    let b = stdout_json(&opnorm(&["thm2", "build", s(&q), "--certificate", s(&cert)]));
    assert_eq!(b["size"], 6);
    assert!(b["commutator_residual"].as_f64().unwrap() <= 1e-10);
    assert!(b["reconstruction_error"].as_f64().unwrap() <= 1e-10);
    assert!(cert.exists());

    // β₁ = 0 breaks the product identity
    let bad = std::fs::read_to_string(&q).unwrap().replace(r#""coeffs":[[1],[0],[0],[0]]},
          "beta2""#, r#""coeffs":[[0],[0],[0],[1]]},
          "beta2""#);
    let bad = write(dir.path(), "bad.json", &bad);
    let out = opnorm(&["thm2", "build", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("identity"));
}

#[test]
fn seeds_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"left":"rowcap:2","right":"full:2x2","coeffs":[[1,0,0,1],[0,1,1,0]]}"#);
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_opnorm"));
        cmd.args(["norm", "h", s(&t), "--restarts", "3", "--iters", "100"]).env_remove("OPNORM_SEED");
        if let Some(e) = env {
            cmd.env("OPNORM_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        stdout_json(&cmd.output().unwrap())
    };
    assert_eq!(run(None, None)["seed"], 0);
    assert_eq!(run(Some("7"), None)["seed"], 7);
    assert_eq!(run(Some("7"), Some("9"))["seed"], 9);
    assert_eq!(run(Some("7"), None), run(None, Some("7")));
    let out = Command::new(env!("CARGO_BIN_EXE_opnorm")).args(["norm", "min", s(&t)]).env("OPNORM_SEED", "x").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(opnorm(&[]).status.code(), Some(2));
    assert_eq!(opnorm(&["norm", "nuclear", "t.json"]).status.code(), Some(2));
    assert_eq!(opnorm(&["norm", "min", "/nonexistent/t.json"]).status.code(), Some(2));
    assert_eq!(opnorm(&["verify", "run", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(opnorm(&["verify", "run", "--dims", "9"]).status.code(), Some(2));
    assert_eq!(opnorm(&["mu", "space", "diag:2"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.json", r#"{"left":"row:2","right":"row:2","coeffs":[[1,0]]}"#);
    let out = opnorm(&["norm", "min", s(&t)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

const SMALL: [&str; 10] =
    ["--dims", "2", "--corpus-size", "2", "--quadruples", "2", "--commutant-samples", "5", "--block-samples", "5"];

#[test]
fn starved_suite_fails_the_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let mut args = vec!["verify", "run", "--restarts", "0", "--out", s(&out_path)];
    args.extend(SMALL);
    let out = opnorm(&args);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["status"] == "fail" && c["note"].as_str().unwrap_or("").contains("converged=false")));
    // closed forms do not depend on the search budget
    let closed = checks.iter().find(|c| c["check_id"] == "cb-row-column-closed-n2").unwrap();
    assert!((closed["computed"][0].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn markdown_report_on_stdout() {
    let mut args = vec!["verify", "run", "--format", "markdown", "--restarts", "2", "--iters", "100"];
    args.extend(SMALL);
    let out = opnorm(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = text.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| check")).count();
    let json = {
        let mut a = vec!["verify", "run", "--restarts", "2", "--iters", "100"];
        a.extend(SMALL);
        let v: Value = serde_json::from_slice(&opnorm(&a).stdout).unwrap();
        v
    };
    assert_eq!(rows, json["checks"].as_array().unwrap().len());
    assert_eq!(json["suite_version"], "1");
    assert!(text.contains(r"$\\|u\\|_{cb}$"));
}
