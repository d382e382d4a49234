//! Exercises the built binary end to end: exit codes, artifact determinism,
//! certificate round trips through files, float mode, and the reproduce
//! selector.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_addiam"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON artifact")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("artifact file exists"))
        .expect("artifact file holds JSON")
}

#[test]
fn diam_artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = bin()
            .args(["diam", "--rep", "sl2:4", "--sub", "upper:4:2", "--seed", "11", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "reruns are byte-identical");
    let artifact = read_json(&a);
    assert_eq!(artifact["outcome"], "exact");
    assert_eq!(artifact["value"], 2);
    assert_eq!(artifact["mode"], "exact");
}

#[test]
fn verify_round_trips_both_certificate_kinds() {
    let dir = tempfile::tempdir().unwrap();

    let diam_path = dir.path().join("diam.json");
    let out = bin()
        .args(["diam", "--rep", "conj:sln:3", "--sub", "named:3:zero_diag", "--out"])
        .arg(&diam_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cert = read_json(&diam_path)["certificates"][0].clone();
    assert!(cert.is_object());
    let cert_path = dir.path().join("cert.json");
    fs::write(&cert_path, cert.to_string()).unwrap();
    let out = bin().arg("verify").arg(&cert_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["valid"], true);
    assert_eq!(report["value"], 2);

    let waring_path = dir.path().join("waring.json");
    let out = bin()
        .args(["waring", "--map", "twisted_cubic", "--point", "1,1", "--out"])
        .arg(&waring_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let artifact = read_json(&waring_path);
    assert_eq!(artifact["outcome"], "bounded");
    let wcert = artifact["result"]["certificate"].clone();
    let wcert_path = dir.path().join("wcert.json");
    fs::write(&wcert_path, wcert.to_string()).unwrap();
    let out = bin().arg("verify").arg(&wcert_path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["kind"], "waring");
    assert_eq!(report["value"], 4);
}

#[test]
fn tampered_certificates_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let diam_path = dir.path().join("diam.json");
    let out = bin()
        .args(["diam", "--rep", "conj:sln:4", "--sub", "named:4:counterexample", "--out"])
        .arg(&diam_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let mut cert = read_json(&diam_path)["certificates"][0].clone();
    cert["value"] = json!(2);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, cert.to_string()).unwrap();
    let out = bin().arg("verify").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("verification failed"), "stderr: {err}");
}

#[test]
fn capped_searches_are_inconclusive() {
    // No pair of translates ever covers this space, so capping the search
    // at pairs is inconclusive by necessity, not by a weak budget.
    let out = run(&[
        "diam",
        "--rep",
        "conj:sln:4",
        "--sub",
        "named:4:last_rowcol_zero",
        "--max-k",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let artifact = stdout_json(&out);
    assert_eq!(artifact["outcome"], "inconclusive");
    assert_eq!(artifact["value"]["lower"], 2);
    assert_eq!(artifact["value"]["upper"], Value::Null);
}

#[test]
fn float_mode_reports_checks_instead_of_certificates() {
    let out = run(&[
        "diam",
        "--rep",
        "conj:sln:3",
        "--sub",
        "named:3:zero_diag",
        "--tolerance",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let artifact = stdout_json(&out);
    assert_eq!(artifact["mode"], "float");
    assert!(artifact.get("certificates").is_none(), "float mode emits no certificates");
    let checks = artifact["float_checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert_eq!(checks[0]["covers"], true);

    let out = run(&["verify", "nowhere.json", "--tolerance", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("drop --tolerance"));
}

#[test]
fn liediam_certifies_the_monomial_window() {
    let out = run(&["liediam", "--rep", "sl2:4", "--sub", "upper:4:2", "--lie", "mon"]);
    assert_eq!(out.status.code(), Some(0));
    let artifact = stdout_json(&out);
    assert_eq!(artifact["outcome"], "exact");
    assert_eq!(artifact["value"], 2);

    let out = run(&["liediam", "--rep", "sl2:4", "--sub", "upper:4:2", "--lie", "elem"]);
    assert_eq!(out.status.code(), Some(0));
    let artifact = stdout_json(&out);
    assert_eq!(artifact["value"], "infinite");
}

#[test]
fn decompose_requires_float_mode() {
    let out = run(&[
        "waring",
        "--map",
        "twisted_cubic",
        "--point",
        "1,1",
        "--decompose",
        "3",
        "--target",
        "0,1,0,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tolerance"));

    let out = run(&[
        "waring",
        "--map",
        "twisted_cubic",
        "--point",
        "1,1",
        "--decompose",
        "3",
        "--target",
        "0,1,0,0",
        "--tolerance",
        "1e-8",
        "--seed",
        "71",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let artifact = stdout_json(&out);
    assert_eq!(artifact["outcome"], "decomposed");
    assert!(artifact["result"]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn enumerate_reports_the_flip_exception() {
    let out = run(&["enumerate", "--n", "3", "--min-dim", "5", "--max-dim", "7", "--check-flip"]);
    assert_eq!(out.status.code(), Some(0), "every n = 3 space is flip-covered");
    let artifact = stdout_json(&out);
    let total: u64 = artifact["rows"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 6);

    let out = bin()
        .args(["enumerate", "--n", "4", "--min-dim", "10", "--max-dim", "14", "--check-flip"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "the B21 + B43 exception is not flip-covered");
    let artifact = stdout_json(&out);
    let rows = artifact["rows"].as_array().unwrap();
    let total: u64 = rows.iter().map(|r| r["count"].as_u64().unwrap()).sum();
    let covered: u64 = rows.iter().map(|r| r["flip_covered"].as_u64().unwrap()).sum();
    assert_eq!(total, 17);
    assert_eq!(covered, 16);
}

#[test]
fn reproduce_needs_a_selector_and_filters_by_prefix() {
    let out = run(&["reproduce"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("selector"));

    let out = run(&["reproduce", "no:such:anchor"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let out = bin().args(["reproduce", "lem:poly_basis", "--out"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("1/1 rows pass"), "stdout: {table}");
    let artifact = read_json(&path);
    assert_eq!(artifact["all_pass"], true);
    let rows = artifact["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].get("runtime").is_none(), "JSON artifact omits runtimes");
}
