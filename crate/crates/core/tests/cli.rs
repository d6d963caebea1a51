use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcone")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eval_qubit_born() {
    let o = run(&["eval", &data("qubit-born.theory")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("0,0\t1.00000000000\t1"), "{out}");
    assert!(out.contains("0,1\t0\t0"), "{out}");
}

#[test]
fn eval_machine_output_is_stable_and_parses() {
    let a = run(&["eval", &data("instrument-chain.theory"), "--machine", "--seed", "3"]);
    let b = run(&["eval", &data("instrument-chain.theory"), "--machine", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    let rows = v["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!((r["probability"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn audit_rebit_dimension_fails() {
    let o = run(&["audit", &data("rebit-pair.theory"), "--postulates", "dimension"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("r_ab = d_ab - d_a*d_b: 1"));
}

#[test]
fn audit_complex_theory_passes_all_postulates() {
    let o = run(&[
        "audit",
        &data("instrument-chain.theory"),
        "--postulates",
        "linearity,dimension,pairing,homogeneity,qubit",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains(": fail"));
}

#[test]
fn unknown_postulate_is_an_input_error() {
    let o = run(&["audit", &data("qubit-born.theory"), "--postulates", "beauty"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown postulate `beauty`"));
}

#[test]
fn dims_lists_every_pair() {
    let o = run(&["dims", &data("ocb.correlation")]);
    assert_eq!(o.status.code(), Some(0));
    // Four systems give ten unordered pairs.
    assert_eq!(stdout(&o).lines().count(), 10);
    assert!(stdout(&o).contains("A1 x B2: d_a=4 d_b=4 d_ab=16"));
}

#[test]
fn demos() {
    let o = run(&["demo", "ocb"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.853553390593"));
    assert!(stdout(&o).contains("causal bound:                           0.750000000000"));
    let o = run(&["demo", "born", "--machine"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn input_errors_exit_one_with_location() {
    let o = run(&["eval", "/nonexistent/x.theory"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/x.theory"));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
