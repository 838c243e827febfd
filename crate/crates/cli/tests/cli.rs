use std::path::PathBuf;
use std::process::{Command, Output};

use amscheme_core::amt::AmtReport;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn amscheme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amscheme"))
        .args(args)
        .env_remove("AMSCHEME_CAP")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = amscheme(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn scheme_show_renders_exact_and_decimal() {
    let dir = tempfile::tempdir().unwrap();
    let z4 = write(&dir, "z4.json", r#"{"type":"group","factors":[4]}"#);
    let (code, v) = json(&["scheme", "show", &z4]);
    assert_eq!(code, 0);
    assert_eq!(v["scheme"]["p"][1][1], "z4");
    assert_eq!(v["scheme"]["classes"], 3);

    let c5 = write(&dir, "c5.json", r#"{"type":"cycle","k":5}"#);
    let text = String::from_utf8(amscheme(&["scheme", "show", &c5]).stdout).unwrap();
    assert!(text.contains("0.618034") && text.contains("-1.618034"));

    let bad = write(
        &dir,
        "bad.json",
        r#"{"type":"table","size":2,"classes":1,"relation":[[0,1],[0,0]]}"#,
    );
    let out = amscheme(&["scheme", "show", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("axiom"));
}

#[test]
fn analyze_reproduces_the_length_12_results() {
    let f3 = fixture("xq11_f3.json");
    let (code, v) = json(&["analyze", &f3, "--k-exclude", "6,3", "--k-exclude", "3,6"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["certified_t"], 3);
    assert_eq!(v["config"]["options"]["k_exclude"][0], "6,3");

    let (_, v) = json(&["analyze", &fixture("xq11_f5.json")]);
    assert_eq!(v["report"]["certified_t"], 3);

    let (code, v) = json(&["analyze", &fixture("xq11_f4.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["certified_t"], 2);

    // asking for more than can be certified exits with 1
    let (code, v) = json(&["analyze", &fixture("xq11_f4.json"), "--t", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["target_met"], false);
}

#[test]
fn report_round_trips_and_is_deterministic() {
    let f3 = fixture("xq11_f3.json");
    let args = [
        "analyze",
        f3.as_str(),
        "--k-exclude",
        "6,3",
        "--k-exclude",
        "3,6",
        "--verify",
        "--suggest-k",
    ];
    let (_, v) = json(&args);
    let report: AmtReport = serde_json::from_value(v["report"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v["report"]);
    assert!(report.classes.iter().all(|c| c.max_design_t.unwrap() >= 3));
    assert!(!report.k_suggestions.is_empty());

    let one = amscheme(&[&["--json", "--threads", "1"][..], &args[..]].concat()).stdout;
    let two = amscheme(&[&["--json", "--threads", "2"][..], &args[..]].concat()).stdout;
    assert_eq!(one, two);
}

#[test]
fn hamming_path_on_golay() {
    let (code, v) = json(&[
        "analyze",
        &fixture("golay24.json"),
        "--hamming",
        "--dual-condition",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["certified_t"], 5);
    let out = amscheme(&["analyze", &fixture("xq11_f3.json"), "--hamming"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mu_examples() {
    for (file, mu) in [
        ("collinear.json", 2),
        ("quinary_sigma_s3.json", 2),
        ("cube.json", 3),
    ] {
        let (code, v) = json(&["mu", &fixture(&format!("points/{file}"))]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["mu"], mu, "{file}");
    }
    let (code, v) = json(&[
        "mu",
        &fixture("points/quinary_s2.json"),
        "--embedding",
        &fixture("points/quinary_grid_s2.json"),
        "--materialize",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["mu"], 3);
    assert_eq!(v["result"]["certificate"]["bound"], 3);
    assert_eq!(
        v["result"]["certificate"]["basis"]
            .as_array()
            .unwrap()
            .len(),
        7
    );
}

#[test]
fn mu_rejects_a_bad_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let emb = write(
        &dir,
        "e.json",
        r#"{"matrix":[["2/5","3/5"],["1/5","-1/5"]],"nodes":[[3,4],[-1,0,1]],"bound":4}"#,
    );
    let out = amscheme(&[
        "mu",
        &fixture("points/quinary_s1.json"),
        "--embedding",
        &emb,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_design_outputs_a_certificate() {
    let f3 = fixture("xq11_f3.json");
    let (code, v) = json(&["verify-design", &f3, "--alpha", "3,3", "--t", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["check"]["result"], "design");
    assert_eq!(v["blocks"], 220);
    let (_, v) = json(&["verify-design", &f3, "--weight", "6", "--t", "5"]);
    assert_eq!(v["check"]["lambdas"][5], 2);
    let (code, _) = json(&["verify-design", &f3, "--alpha", "3,3", "--t", "4"]);
    assert_eq!(code, 1);
}

#[test]
fn dual_and_enumerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dual.json").display().to_string();
    let status = amscheme(&["dual", &fixture("xq11_f5.json"), "-o", &out]).status;
    assert!(status.success());
    let (code, v) = json(&["enumerate", &out]);
    assert_eq!(code, 0);
    assert_eq!(v["size"], "15625");
    assert_eq!(v["weight_distribution"]["(3,3)"], 440);

    let words = write(
        &dir,
        "rep.json",
        r#"{"scheme":{"type":"trivial","q":2},"n":3,"words":[[0,0,0],[1,1,1]]}"#,
    );
    let (_, v) = json(&["enumerate", &words, "--words", "5"]);
    assert_eq!(v["words"].as_array().unwrap().len(), 2);
    // explicit codes have no dual
    assert_eq!(amscheme(&["dual", &words]).status.code(), Some(2));
}

#[test]
fn cap_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_amscheme"))
        .args(["analyze", &fixture("xq11_f5.json")])
        .env("AMSCHEME_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn malformed_flags_exit_2() {
    let f3 = fixture("xq11_f3.json");
    assert_eq!(
        amscheme(&["analyze", &f3, "--k-exclude", "1,2,3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        amscheme(&["analyze", &f3, "--t", "lots"]).status.code(),
        Some(2)
    );
    assert_eq!(
        amscheme(&["analyze", "/nonexistent.json"]).status.code(),
        Some(2)
    );
}
