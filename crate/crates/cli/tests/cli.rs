use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn relift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relift")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn check_lifting_barr_passes() {
    let out = relift(&["check-lifting", "--lifting", "barr", "--functor", "P", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["version"], 1);
    assert_eq!(r["outcome"], "pass");
    assert_eq!(r["results"]["is_lifting"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn check_lifting_top_fails_only_when_strict() {
    let out = relift(&["check-lifting", "--lifting", "top", "--functor", "P", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["failed_conditions"], serde_json::json!(["diagonal"]));
    let out = relift(&["check-lifting", "--lifting", "top", "--functor", "P", "--bound", "2", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let diag = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "diagonal").unwrap();
    assert_eq!(diag["counterexample"]["sets"]["X"], "{a0}");
    assert_eq!(diag["counterexample"]["values"]["a"], "{}");
}

#[test]
fn non_lifting_exits_one() {
    let out = relift(&["check-lifting", "--lifting", "barr", "--functor", "N", "--bound", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["results"]["is_lifting"], false);
}

#[test]
fn cospan_flag() {
    let out = relift(&["check-lifting", "--lifting", "mtilde", "--functor", "M", "--bound", "1", "--cospan"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["name"] == "cospan" && c["verdict"] == "pass"));
}

#[test]
fn check_law_accepts_both_spellings() {
    for name in ["law(barr)", "barr"] {
        let out = relift(&["check-law", "--lifting", name, "--functor", "P", "--bound", "1"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(report(&out)["arguments"]["law"], "law(barr)");
    }
    let out = relift(&["check-law", "--lifting", "top", "--functor", "P", "--bound", "1", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn convert_round_trips() {
    let out = relift(&["convert", "--functor", "P", "--lifting", "barr", "--direction", "to-law", "--roundtrip", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["output"], "law(barr)");
    assert_eq!(r["results"]["components"][1]["relation"], "{({},{}),({{a0}},{a0})}");
    let out = relift(&["convert", "--functor", "N", "--lifting", "law(LJ:3)", "--direction", "to-lifting", "--roundtrip", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["output"], "lifting(law(LJ:3))");
}

#[test]
fn bisim_between_two_models() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"functor":"P","states":["s","t"],"structure":{"s":["t"],"t":[]}}"#);
    let b = write(dir.path(), "b.json", r#"{"version":1,"functor":"P","states":["u","v","w"],"structure":{"u":["v"],"v":[],"w":["w"]}}"#);
    let out = relift(&["bisim", "--lifting", "barr", "--model", &a, "--model", &b]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["greatest_bisimulation"], serde_json::json!([["s", "u"], ["t", "v"]]));

    let out = relift(&["bisim", "--lifting", "barr", "--model", &a]);
    assert_eq!(report(&out)["results"]["relation"], "{(a0,a0),(a1,a1)}");

    let out = relift(&["oracle-compare", "--model", &a, "--model", &b]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn neighbourhood_bisim() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "n.json", r#"{"functor":"N","states":["p","q"],"structure":{"p":[["q"]],"q":[[]]}}"#);
    let out = relift(&["bisim", "--lifting", "LJ:15", "--model", &a, "--functor", "N"]);
    assert_eq!(out.status.code(), Some(0));
    let out = relift(&["bisim", "--lifting", "LJ:15", "--model", &a, "--functor", "M"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "m.json", r#"{"functor":"M","states":["s","t"],"structure":{"s":[["s"]],"t":[]}}"#);
    let out = relift(&["bisim", "--lifting", "mtilde", "--model", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("{s,t}"), "{err}");
    let out = relift(&["bisim", "--lifting", "barr", "--model", &dir.path().join("missing.json").display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_resource_errors_exit_two() {
    assert_eq!(relift(&["check-lifting", "--functor", "Q", "--lifting", "barr"]).status.code(), Some(2));
    assert_eq!(relift(&["check-lifting", "--functor", "P", "--lifting", "nope"]).status.code(), Some(2));
    assert_eq!(relift(&["check-lifting", "--functor", "P", "--lifting", "mtilde"]).status.code(), Some(2));
    assert_eq!(relift(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(relift(&["verify-theorems", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(relift(&["check-lifting", "--functor", "N", "--lifting", "LJ:1", "--bound", "7"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_relift"))
        .args(["check-lifting", "--functor", "N", "--lifting", "top", "--bound", "2"])
        .env("RELIFT_CARRIER_LIMIT", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("carrier limit of 10"));
}

#[test]
fn verify_theorems_single_suite() {
    let out = relift(&["verify-theorems", "--suite", "barr-minimal"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["summary"]["failed"], 0);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["suite"] == "barr-minimal"));
}

#[test]
fn lj_classification_reports_its_failures() {
    let out = relift(&["verify-theorems", "--suite", "lj-classification", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let distinct = r["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().contains("pairwise distinct")).unwrap();
    assert_eq!(distinct["verdict"], "fail");
}

#[test]
fn reports_are_deterministic_and_out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("r1.json").display().to_string();
    let p2 = dir.path().join("r2.json").display().to_string();
    for p in [&p1, &p2] {
        let out = relift(&["oracle-compare", "--count", "10", "--seed", "5", "--out", p]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(a, b);
    let r: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["summary"]["passed"], 10);
    assert!(r.get("elapsed_ms").is_none());
    let timed = report(&relift(&["oracle-compare", "--count", "1", "--timing"]));
    assert!(timed["elapsed_ms"].is_u64());
}
