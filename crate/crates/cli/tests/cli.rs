use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hankelc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankelc"))
        .args(args)
        .env_remove("HANKELC_THREADS")
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

const EIGEN: &str = r#"{"mu": ["1/2"], "function": {"decay": "1/2", "terms": [{"k": [0], "q": "1"}]}}"#;

#[test]
fn transform_eigenfunction_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "eigen.json", EIGEN);
    let out = dir.path().join("grid.csv");
    let o = hankelc(&["transform", "--spec", &spec, "--grid", "0.1:4:64", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x1", "value"]);
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let x: f64 = rec[0].parse().unwrap();
        let v: f64 = rec[1].parse().unwrap();
        assert!((v - x * (-x * x / 2.0).exp()).abs() < 1e-6);
        rows += 1;
    }
    assert_eq!(rows, 64);
}

#[test]
fn transform_json_round_trips_through_schema() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "eigen.json", EIGEN);
    let o = hankelc(&["transform", "--spec", &spec, "--grid", "0.5:2:4", "--threads", "2"]);
    assert!(o.status.success());
    let g: hankelc_core::hankel::GridFunction = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(g.values.len(), 4);
    let again = serde_json::to_value(&g).unwrap();
    assert_eq!(again, json_stdout(&o));
}

#[test]
fn transform_of_empty_function_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "zero.json", r#"{"mu": ["0", "1/2"], "function": {"terms": []}}"#);
    let o = hankelc(&["transform", "--spec", &spec, "--grid", "0.1:1:3"]);
    assert!(o.status.success());
    let v = json_stdout(&o);
    assert!(v["values"].as_array().unwrap().iter().all(|x| x.as_f64() == Some(0.0)));
    assert_eq!(v["values"].as_array().unwrap().len(), 9);
}

#[test]
fn invalid_mu_is_a_spec_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", r#"{"mu": ["-1"], "function": {"decay": "1/2", "terms": [{"k": [0], "q": "1"}]}}"#);
    let o = hankelc(&["transform", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu_i >= -1/2"));
}

#[test]
fn unknown_fields_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", r#"{"mu": ["0"], "colour": 3}"#);
    let o = hankelc(&["kernel", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "eigen.json", EIGEN);
    assert_eq!(hankelc(&["transform", "--spec", &spec, "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(hankelc(&["transform", "--spec", &spec, "--quad", "x:2"]).status.code(), Some(2));
    assert_eq!(hankelc(&["transform"]).status.code(), Some(2));
}

#[test]
fn kernel_laplacian_one_dimensional() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "p.json", r#"{"mu": ["1/2"], "P": {"terms": [{"k": [1], "a": "1"}]}}"#);
    let o = hankelc(&["kernel", "--spec", &spec, "--degree", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    let basis = v["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 1);
    assert_eq!(basis[0]["terms"], serde_json::json!([{"k": [0], "q": "1"}]));
    assert_eq!(v["certificate"]["elements"][0]["exact_residual_terms"], 0);
}

#[test]
fn kernel_identity_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "p.json", r#"{"mu": ["0"], "P": {"terms": [{"k": [0], "a": "1"}]}}"#);
    let o = hankelc(&["kernel", "--spec", &spec]);
    assert!(o.status.success());
    assert!(json_stdout(&o)["basis"].as_array().unwrap().is_empty());
}

#[test]
fn kernel_hypothesis_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "p.json", r#"{"mu": ["0", "0"], "P": {"terms": [{"k": [1, 1], "a": "1"}]}}"#);
    let o = hankelc(&["kernel", "--spec", &spec, "--degree", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x_1"));
}

#[test]
fn verify_identities_and_unknown_suite() {
    let o = hankelc(&["verify", "identities"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_stdout(&o)["pass"], true);
    assert_eq!(hankelc(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_failure_exit_code() {
    // a tolerance no numeric check can meet
    let o = hankelc(&["verify", "identities", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_stdout(&o)["pass"], false);
}

#[test]
fn pair_delta_and_taylor() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "g.json",
        r#"{"mu": ["1/2"], "k": [1], "function": {"decay": "1/2", "terms": [{"k": [0], "q": "1"}]}}"#,
    );
    let o = hankelc(&["pair-delta", "--spec", &spec]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    let c_mu = (std::f64::consts::PI / 2.0).sqrt();
    assert!((v["value"].as_f64().unwrap() + c_mu).abs() < 1e-9);
    assert!(v["transform"]["relative_gap"].as_f64().unwrap() < 1e-5);

    let o = hankelc(&["taylor", "--spec", &spec, "--degree", "2"]);
    assert!(o.status.success());
    let v = json_stdout(&o);
    let exact: Vec<&str> = v["coefficients"].as_array().unwrap().iter().map(|c| c["exact"].as_str().unwrap()).collect();
    assert_eq!(exact, ["1", "-1/2", "1/8"]);
}

#[test]
fn seminorm_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s.json",
        r#"{"mu": ["1/2"], "m": 1, "seminorm": "gamma", "function": {"decay": "1/2", "terms": [{"k": [0], "q": "1"}]}}"#,
    );
    let o = hankelc(&["seminorm", "--spec", &spec]);
    assert!(o.status.success());
    let v = json_stdout(&o)["value"].as_f64().unwrap();
    assert!((v - 2.0 * (-0.5f64).exp()).abs() < 1e-8);

    let spec = write_spec(
        dir.path(),
        "l.json",
        r#"{"mu": ["1/2"], "k": [1], "seminorm": "lambda", "function": {"decay": "1/2", "terms": [{"k": [0], "q": "1"}]}}"#,
    );
    let o = hankelc(&["seminorm", "--spec", &spec]);
    assert!((json_stdout(&o)["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn seminorm_needs_decay() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "s.json", r#"{"mu": ["0"], "function": {"terms": [{"k": [1], "q": "1"}]}}"#);
    assert_eq!(hankelc(&["seminorm", "--spec", &spec]).status.code(), Some(2));
}

#[test]
fn multiplier_inverse_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "m.json",
        r#"{"mu": ["0", "0"], "multiplier": {
            "num": [{"k": [0, 0], "q": "1"}],
            "den": [{"k": [0, 0], "q": "1"}, {"k": [1, 0], "q": "1"}, {"k": [0, 1], "q": "1"}]}}"#,
    );
    let o = hankelc(&["multiplier", "--spec", &spec, "--degree", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert!(entries.iter().all(|e| e["n_k"] == 0));
    assert!((entries[0]["bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn multiplier_hypothesis_failure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "m.json",
        r#"{"mu": ["0"], "multiplier": {"num": [{"k": [0], "q": "1"}], "den": [{"k": [1], "q": "1"}]}}"#,
    );
    assert_eq!(hankelc(&["multiplier", "--spec", &spec]).status.code(), Some(4));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "two.json",
        r#"{"mu": ["0", "1/2"], "function": {"decay": "1/2", "terms": [{"k": [1, 0], "q": "2/3"}]}}"#,
    );
    let a = hankelc(&["transform", "--spec", &spec, "--grid", "0.2:3:7", "--threads", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_hankelc"))
        .args(["transform", "--spec", &spec, "--grid", "0.2:3:7"])
        .env("HANKELC_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}
