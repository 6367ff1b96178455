//! Black-box tests against the installed binary: exit codes, determinism,
//! and the CSV dump format.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gammacert"))
}

fn write_spec(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("gammacert-cli-{name}-{}.json", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path
}

const EXAMPLE2: &str = r#"{
    "q": 0.5,
    "numerator": [{"A": "1/6", "a": 0.0, "alpha": 5}],
    "denominator": [
        {"B": "1/3", "b": 3.0, "beta": 1},
        {"B": "1/2", "b": 2.0, "beta": 1}
    ]
}"#;

const UNBALANCED: &str = r#"{
    "q": "classical",
    "numerator": [{"A": 1.0, "a": 0.5, "alpha": 2}],
    "denominator": [{"B": 1.0, "b": 1.0, "beta": 1}]
}"#;

#[test]
fn exit_code_certified_true() {
    let path = write_spec("true", EXAMPLE2);
    let out = bin().args(["check", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_code_certified_false() {
    let path = write_spec("false", UNBALANCED);
    let out = bin().args(["check", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_supported() {
    let path = write_spec("supported", EXAMPLE2);
    let out = bin()
        .args(["oracle", path.to_str().unwrap(), "--max-order", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_code_input_error() {
    let out = bin().args(["check", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let path = write_spec("malformed", "{not json");
    let out = bin().args(["check", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_report_is_deterministic() {
    let path = write_spec("det", EXAMPLE2);
    let run = || {
        bin()
            .args(["check", path.to_str().unwrap(), "--report", "json", "--no-timing"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "reports differ between runs");
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(parsed.get("overall").is_some());
    assert!(parsed.get("timing").is_none());
}

#[test]
fn eval_subcommand() {
    let out = bin().args(["eval", "digamma", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v + 0.5772156649015329).abs() < 1e-12);
}

#[test]
fn dump_csv_lattice() {
    let path = write_spec("dump", EXAMPLE2);
    let csv = std::env::temp_dir().join(format!("gammacert-dump-{}.csv", std::process::id()));
    let out = bin()
        .args([
            "check",
            path.to_str().unwrap(),
            "--dump",
            csv.to_str().unwrap(),
            "--kmax",
            "60",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,k,mass"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("rational,"), "{first}");
}
