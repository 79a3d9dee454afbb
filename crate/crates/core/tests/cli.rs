use std::io::Write;

use liesym::cli::main_with_args;
use liesym::fixtures;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("liesym").chain(args.iter().copied());
    let code = main_with_args(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn table_is_deterministic_in_both_formats() {
    let a = run(&["table", "--builtin", "kdv"]);
    assert_eq!(a, run(&["table", "--builtin", "kdv"]));
    assert_eq!(a.0, 0);
    assert!(a.1.contains("v3 |     0   -v1     0 -2*v3"), "{}", a.1);
    let (_, j1, _) = run(&["--json", "table", "--builtin", "heat"]);
    let (_, j2, _) = run(&["--json", "table", "--builtin", "heat"]);
    assert_eq!(j1, j2);
    let v: Value = serde_json::from_str(&j1).unwrap();
    // [v2, v6] = 4 v4 - 2 v3
    assert_eq!(v["coefficients"][1][5], serde_json::json!(["0", "0", "-2", "4", "0", "0"]));
}

#[test]
fn adjoint_chain_for_heat() {
    let (code, out, _) = run(&["adjoint", "--builtin", "heat", "--order", "4,5,3,1,2,6"]);
    assert_eq!(code, 0);
    assert!(out.contains("A = A4 A5 A3 A1 A2 A6:"));
    assert!(out.contains("4*e2^2*exp(-2*e4)"), "{out}");
    assert!(out.contains("2*e5*exp(2*e4)"));
    let (code, _, err) = run(&["adjoint", "--builtin", "heat", "--order", "1,2,2"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn verify_reports_agree_across_formats() {
    let (code, text, _) = run(&["verify", "--builtin", "kdv", "--system", "kdv-optsys"]);
    assert_eq!(code, 0);
    assert!(text.contains("coverage 1.0000"), "{text}");
    assert!(text.trim_end().ends_with("PASS"));
    let v = json(&["verify", "--builtin", "kdv", "--system", "kdv-optsys"]);
    assert_eq!(v["algebra"], "kdv");
    assert_eq!(v["coverage"]["matched"], 200);
    assert_eq!(v["coverage"]["coverage"].as_f64(), Some(1.0));
    for (name, hits) in v["coverage"]["hits"].as_object().unwrap() {
        let line = format!("  {name:<12} {hits}");
        assert!(text.contains(&line), "missing '{line}'");
    }
}

#[test]
fn pruned_system_fails_verification() {
    let pruned: String = fixtures::KDV_OPTSYS_JSON
        .lines()
        .filter(|l| !l.contains(r#""name": "v2""#))
        .collect::<Vec<_>>()
        .join("\n");
    assert_ne!(pruned, fixtures::KDV_OPTSYS_JSON.trim_end());
    let f = temp_file(&pruned);
    let path = f.path().to_str().unwrap();
    let (code, out, _) = run(&["verify", "--builtin", "kdv", "--system", path]);
    assert_eq!(code, 1, "{out}");
    assert!(out.trim_end().ends_with("FAIL"), "{out}");
}

#[test]
fn input_errors_exit_with_two() {
    let bad = temp_file(r#"{"name": "x", "dim": 2, "generators": ["a", "b"], "brackets": [{"i": 1, "j": 2}]}"#);
    let (code, _, err) = run(&["table", "--algebra", bad.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("coeffs"), "{err}");

    let jacobi = fixtures::KDV_JSON.replace(
        r#"{"i": 2, "j": 3, "coeffs": ["1", "0", "0", "0"]}"#,
        r#"{"i": 2, "j": 3, "coeffs": ["0", "1", "0", "0"]}"#,
    );
    let f = temp_file(&jacobi);
    let (code, _, err) = run(&["table", "--algebra", f.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.to_lowercase().contains("jacobi"), "{err}");

    let so3 = temp_file(
        r#"{"name": "so3", "dim": 3, "generators": ["x", "y", "z"], "brackets": [
            {"i": 1, "j": 2, "coeffs": ["0", "0", "1"]},
            {"i": 2, "j": 3, "coeffs": ["1", "0", "0"]},
            {"i": 1, "j": 3, "coeffs": ["0", "-1", "0"]}]}"#,
    );
    let (code, _, err) = run(&["adjoint", "--algebra", so3.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("rational"), "{err}");

    let (code, _, err) = run(&["verify", "--builtin", "heat", "--system", "kdv-optsys"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());

    let (code, _, _) = run(&["table"]);
    assert_eq!(code, 2);
}

#[test]
fn invariants_equiv_and_stratify_run() {
    let (code, out, _) = run(&["invariants", "--builtin", "heat", "--degree", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("-4*a2*a6 + a4^2"), "{out}");
    let (code, out, _) = run(&["invariants", "--builtin", "kdv", "--degree", "5", "--constraint", "a4=0"]);
    assert_eq!(code, 0);
    assert!(out.contains("a2^2*a3^3"), "{out}");

    let (code, out, _) = run(&["equiv", "--builtin", "kdv", "--source", "3,5,2,1", "--target", "v4"]);
    assert_eq!(code, 0);
    assert!(out.contains("equivalent"), "{out}");
    let (code, out, _) = run(&["equiv", "--builtin", "heat", "--source", "0,0,1/4,0,0,1", "--target", "omega5", "--system", "heat-optsys"]);
    assert_eq!(code, 0);
    assert!(out.contains("decision: inequivalent (CausalOrientation)"), "{out}");

    let v = json(&["stratify", "--builtin", "kdv"]);
    assert_eq!(v["branch"], "a4");
    assert_eq!(v["children"][0]["invariants"][0]["poly"], "a2^2*a3^3");
}
