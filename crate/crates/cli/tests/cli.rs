use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperbaker"))
}

fn curve(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../curves").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("HYPERBAKER_PRECISION").output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn baker_genus_one_closed_form() {
    let c = curve("x4m1.json");
    let o = run(&["baker", "--curve", c.to_str().unwrap()]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["p"][0][0], "(2*x1 + 2)/(x1 - 1)");
    let o = run(&["baker", "--curve", c.to_str().unwrap(), "--points", curve("points_g1.json").to_str().unwrap()]);
    assert_eq!(stdout_json(&o)["p"][0][0], "10");
}

#[test]
fn numeric_points_and_a_point_off_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    // y^2 = x^4 - 1 at x = 2: y = sqrt(15)
    std::fs::write(&good, format!(r#"{{"points": [{{"x": 2, "y": {}}}]}}"#, 15f64.sqrt())).unwrap();
    let c = curve("x4m1.json");
    let o = run(&["baker", "--curve", c.to_str().unwrap(), "--points", good.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = &stdout_json(&o)["p_values"][0][0];
    assert!((p[0].as_f64().unwrap() - 6.0).abs() < 1e-12);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"points": [{"x": 2, "y": 1}]}"#).unwrap();
    let o = run(&["baker", "--curve", c.to_str().unwrap(), "--points", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn omega_and_expand() {
    let o = run(&["omega", "--symbolic", "--genus", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["omega"][0][0], "-2*a^2*nu0 - a*nu2");
    let o = run(&["expand", "--curve", curve("x4m1.json").to_str().unwrap(), "--order", "6"]);
    let v = stdout_json(&o);
    assert_eq!(v["coefficients"][1], "1");
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 7);
    let o = run(&["expand", "--curve", curve("g2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn periods_are_deterministic() {
    let c = curve("g2.json");
    let a = run(&["periods", "--curve", c.to_str().unwrap()]);
    let b = run(&["periods", "--curve", c.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["tau"].as_array().unwrap().len(), 2);
    assert_eq!(v["tau"][0][0].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reference_curve_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (r1, r2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let c = curve("x4m1.json");
    for r in [&r1, &r2] {
        let o = run(&["verify", "--curve", c.to_str().unwrap(), "--suite", "all", "--seed", "7", "--report", r.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    }
    let a = std::fs::read(&r1).unwrap();
    assert_eq!(a, std::fs::read(&r2).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 30);
    for k in checks {
        for key in ["name", "paper_ref", "measured", "tolerance", "pass"] {
            assert!(k.get(key).is_some(), "{key} missing in {k}");
        }
    }
    assert_eq!(v["pass"], true);
    assert_eq!(v["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn failing_check_gives_exit_one() {
    // measured values are ~1e-15, a tolerance of 1e-300 cannot be met
    let o = run(&["verify", "--genus", "1", "--suite", "periods", "--tolerance", "legendre_k_g1=1e-300"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(run(&["verify", "--tolerance", "x=-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--tolerance", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--genus", "7"]).status.code(), Some(2));
    assert_eq!(run(&["periods", "--curve", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--precision", "quad"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn symbolic_algebraic_suite_genus_two() {
    let o = run(&["verify", "--suite", "algebraic", "--genus", "2", "--symbolic"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn precision_from_environment() {
    let o = bin()
        .args(["periods", "--curve", curve("x4m1.json").to_str().unwrap()])
        .env("HYPERBAKER_PRECISION", "extended")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin().args(["verify", "--suite", "algebraic"]).env("HYPERBAKER_PRECISION", "bad").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
