#![cfg(feature = "cli")]

use std::path::Path;
use std::process::{Command, Output};

use floquet::dispersion::BranchKind;
use floquet::report::branches_from_csv;
use num_complex::Complex64;
use serde_json::Value;

fn floquet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floquet")).args(args).env("FLOQUET_THREADS", "2").output().expect("spawn floquet")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json_at(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn burgers_fisher_curves_match_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curves.csv");
    let svg = dir.path().join("curves.svg");
    let out = floquet(&[
        "curves", "--model", "burgers-fisher", "--htilde", "1e-4", "--mu", "-0.9:0.9:181",
        "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("mu,branch,re_lambda,im_lambda,kind\n"));
    assert!(!text.contains('\r'));
    let branches = branches_from_csv(&text).unwrap();
    assert_eq!(branches.len(), 2);
    for b in &branches {
        assert_eq!(b.kind, BranchKind::Limiting);
        assert!(b.samples.len() >= 181);
        for &(mu, lam) in &b.samples {
            let root = (1.0 - mu * mu).sqrt();
            let exact = [Complex64::new(root, mu / 2.0), Complex64::new(-root, mu / 2.0)];
            let err = exact.iter().map(|e| (e - lam).norm()).fold(f64::INFINITY, f64::min);
            assert!(err < 1e-9, "mu {mu}: {lam} off by {err}");
        }
    }
    let picture = std::fs::read_to_string(&svg).unwrap();
    assert!(picture.contains("<svg") && picture.contains("Re λ") && picture.contains("Im λ"));
}

#[test]
fn gle_verdict_is_unstable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verdict.json");
    let out = floquet(&["verdict", "--model", "gle", "--p1", "0.5", "--delta", "0.05", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json_at(&path);
    assert_eq!(v["verdict"], "unstable");
    let re = v["witness"]["re"].as_f64().unwrap();
    assert!((0.3..=0.7).contains(&re), "witness {re}");
    for key in ["model", "params", "counts", "tolerances", "runtime_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["runtime_ms"].is_null());
}

#[test]
fn rdode_verdict_witness_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rd.json");
    let out = floquet(&["verdict", "--model", "rdode", "--c0", "1", "--varpi0", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json_at(&path);
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["witness"]["mu"].as_f64(), Some(0.0));
    let re = v["witness"]["re"].as_f64().unwrap();
    assert!((re - 1.0).abs() < 0.05, "witness {re}");
}

#[test]
fn frozen_mathieu_zero_at_a0() {
    let out = floquet(&["zeros", "--model", "mathieu", "--a0", "1", "--eps", "0", "--mu", "0", "--center", "1,0", "--radius", "0.5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"][0]["count"], 1);
    let z = &v["result"]["zeros"][0];
    assert!((z["re"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(z["im"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(z["multiplicity"], 1);
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bf.cfg");
    std::fs::write(&cfg, "[model]\nname = burgers-fisher\nhtilde = 1e-4\n\n[numerics]\nmu = 0:1:5\n").unwrap();
    let out = floquet(&["curves", "--model", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let branches = branches_from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(branches.len(), 2);
    for b in &branches {
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            // the branches collide at mu = 1, which is flagged as a gap
            assert!(b.samples.iter().any(|s| s.0 == mu) || b.gaps.contains(&mu), "grid point {mu} missing");
        }
    }
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[model]\nname = gle\nwobble = 3\n").unwrap();
    let out = floquet(&["curves", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.cfg:3"), "{}", stderr(&out));
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(floquet(&["spin"]).status.code(), Some(1));
    assert_eq!(floquet(&["curves", "--model", "nosuch"]).status.code(), Some(1));
    assert_eq!(floquet(&["curves", "--model", "gle", "--htilde", "1e-3"]).status.code(), Some(1));
    assert_eq!(floquet(&["curves", "--model", "gle", "--mu", "1:0:5"]).status.code(), Some(1));
    assert_eq!(floquet(&["curves", "--model", "gle", "--tol", "-1"]).status.code(), Some(1));
    let out = floquet(&["curves", "--model", "gle", "--mu", "0:1:3", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert_eq!(floquet(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_floquet"))
        .args(["curves", "--model", "gle", "--mu", "0:1:3"])
        .env("FLOQUET_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn orbit_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let out = floquet(&["orbit", "--model", "burgers-fisher", "--htilde", "1e-3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let period = v["result"]["period"].as_f64().unwrap();
    assert!((period - 3f64.sqrt() * std::f64::consts::PI).abs() < 0.2, "period {period}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("xi,x,y\n"));
    assert!(text.lines().count() > 100);

    let path = dir.path().join("validate.json");
    let out = floquet(&["validate", "--model", "mathieu", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(json_at(&path)["command"], "validate");
}
