//! Black-box checks of the binary: output formats, config precedence,
//! determinism, and the exit-code contract.

use std::process::{Command, Output};

fn qhlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhlc")).args(args).output().expect("spawn qhlc")
}

fn qhlc_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qhlc"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("spawn qhlc")
}

#[test]
fn csv_roots_golden_row() {
    let out = qhlc(&["roots", "--alpha", "-2", "--mu", "0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha,mu,v1,v2,v3");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "-1.6180339887498949e0");
    assert_eq!(row[3], "-1.0000000000000000e0");
    assert_eq!(row[4], "6.1803398874989479e-1");
}

#[test]
fn json_has_schema_field() {
    for args in [
        vec!["roots", "--alpha", "-2"],
        vec!["equilibria", "--alpha", "-2"],
        vec!["bounds", "--alpha", "-2.3811", "--mu", "0.6875", "--lambda", "-0.5625"],
    ] {
        let out = qhlc(&args);
        assert!(out.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["schema"], serde_json::json!(1), "{args:?}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["gap", "--alpha", "-2.11", "--format", "csv"];
    let a = qhlc(&args);
    let b = qhlc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn flags_override_environment() {
    // the env var alone changes the format; an explicit flag wins over it
    let out = qhlc_env(&["roots", "--alpha", "-2"], &[("QHLC_FORMAT", "csv")]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("alpha,mu"));
    let out = qhlc_env(&["roots", "--alpha", "-2", "--format", "json"], &[("QHLC_FORMAT", "csv")]);
    assert!(String::from_utf8(out.stdout).unwrap().trim_start().starts_with('{'));
}

#[test]
fn exit_codes() {
    // usage
    let out = qhlc(&["roots"]);
    assert_eq!(out.status.code(), Some(1));
    let out = qhlc(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
    // domain
    let out = qhlc(&["roots", "--alpha", "1", "--mu", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    let out = qhlc(&["roots", "--alpha", "-2", "--mu", "0", "--rtol", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // numerical: a bracket whose gap has the same sign at both ends
    let out = qhlc(&["alpha-star", "--lo", "-2.40", "--hi", "-2.30", "--tol", "1e-3"]);
    assert_eq!(out.status.code(), Some(3));
    // help is not an error
    let out = qhlc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_file_instead_of_stdout() {
    let dir = std::env::temp_dir().join("qhlc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("roots.csv");
    let out = qhlc(&[
        "roots",
        "--alpha",
        "-2",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("alpha,mu,v1,v2,v3"));
    std::fs::remove_file(&path).unwrap();
}
