use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_diffloc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(s) = stdin {
        child.stdin.take().unwrap().write_all(s.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn localize_identity() {
    let out = run(
        &["localize"],
        Some(r#"{"diffeo": {"mean": 0, "cos": [], "sin": []}}"#),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["max_modes"], 4096);
    assert_eq!(v["result"]["residual"], 0.0);
    for f in v["result"]["word"]["factors"].as_array().unwrap() {
        assert_eq!(f["diffeo"], json!({"mean": 0.0, "cos": [], "sin": []}));
    }
}

#[test]
fn rotation_word_near_pi() {
    let out = run(&["rotation-word", "--alpha", "3.14159265"], None);
    let w = json_of(&out)["result"]["word"].clone();
    let params: Vec<(String, f64)> = w
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            (
                f["kind"].as_str().unwrap().to_string(),
                f["param"].as_f64().unwrap(),
            )
        })
        .collect();
    assert_eq!(params.len(), 3);
    for ((k, p), (ek, ep)) in params.iter().zip([("S", -1.0), ("T", 1.0), ("S", -1.0)]) {
        assert_eq!(k, ek);
        assert!((p - ep).abs() < 1e-8);
    }
    let out = run(&["dilation-word", "--tau", "-0.5"], None);
    assert!(json_of(&out)["result"]["product_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn exit_codes() {
    let outside = run(
        &["localize"],
        Some(r#"{"diffeo": {"mean": 2.5, "cos": [], "sin": []}}"#),
    );
    assert_eq!(outside.status.code(), Some(1));
    assert_eq!(json_of(&outside)["error"]["kind"], "OutsideNeighborhood");
    let malformed = run(&["iwasawa"], Some("{not json"));
    assert_eq!(malformed.status.code(), Some(1));
    let singular = run(&["iwasawa"], Some(r#"{"m": [[1, 2], [2, 4]]}"#));
    assert_eq!(singular.status.code(), Some(1));
    assert_eq!(run(&["nope"], None).status.code(), Some(1));
    assert_eq!(
        run(&["check", "--margin", "0.7"], None).status.code(),
        Some(1)
    );
    // a step that is admissible but far too small for the word cap
    let long = run(
        &["moebius-word", "--step", "1e-6"],
        Some(r#"{"m": [[1, 5], [0, 1]]}"#),
    );
    assert_eq!(long.status.code(), Some(2));
    assert_eq!(json_of(&long)["error"]["kind"], "WordTooLong");
}

#[test]
fn files_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let config = dir.path().join("cfg.json");
    let output = dir.path().join("out.json");
    fs::write(
        &input,
        r#"{"diffeo": {"mean": 2.0, "cos": [0.2], "sin": []}}"#,
    )
    .unwrap();
    fs::write(&config, r#"{"safety": 0.5}"#).unwrap();
    let args = [
        "slice",
        "--input",
        input.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--modes",
        "64",
    ];
    let out = run(&args, None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["config"]["safety"], 0.5);
    assert_eq!(v["config"]["modes"], 64);
    let n = v["result"]["count"].as_u64().unwrap();
    assert!(n.is_power_of_two() && n > 1);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn grid_dump() {
    let out = run(&["grid"], Some(r#"{"mean": 0.1, "cos": [], "sin": [0.3]}"#));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,phi,dphi");
    assert_eq!(lines.len(), 1025);
    let row: Vec<f64> = lines[257].split(',').map(|s| s.parse().unwrap()).collect();
    let x = std::f64::consts::TAU * 256.0 / 1024.0;
    assert!((row[0] - x).abs() < 1e-15);
    assert!((row[1] - (x + 0.1 + 0.3 * x.sin())).abs() < 1e-14);
    assert!((row[2] - (1.0 + 0.3 * x.cos())).abs() < 1e-14);
}

#[test]
fn tables() {
    let cover = r#"{"elements": [{"m": [[0, 1], [-1, 0]], "lift0": 3.141592653589793},
                                 {"m": [[0, 1], [-1, 0]], "lift0": 3.141592653589793}]}"#;
    let v = json_of(&run(&["cover"], Some(cover)));
    assert!(
        (v["result"]["product"]["lift0"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-9
    );
    assert!(v["result"]["homomorphism_defect"].as_f64().unwrap() < 1e-10);
    let t = &v["result"]["product_trivialization"];
    assert!((t[0][0].as_f64().unwrap() + 1.0).abs() < 1e-10);
    let els = r#"{"elements": [{"m": [[1, 1], [0, 1]]}, {"m": [[1, 0], [1, 1]]}, {"m": [[2, 0], [0, 0.5]]}]}"#;
    let v = json_of(&run(&["cocycle"], Some(els)));
    assert_eq!(v["result"]["max_identity_defect"], 0.0);
    assert_eq!(v["result"]["table"].as_array().unwrap().len(), 3);
    let ds = r#"{"diffeos": [{"mean": 0, "cos": [0.1], "sin": [0.2]}, {"mean": 0.3, "cos": [0, 0.05], "sin": []}]}"#;
    let v = json_of(&run(&["bott"], Some(ds)));
    assert!(v["result"]["max_identity_defect"].as_f64().unwrap() < 1e-8);
}

#[test]
fn check_is_deterministic() {
    let a = run(&["check", "--suite", "moebius", "--seed", "3"], None);
    let b = run(&["check", "--suite", "moebius", "--seed", "3"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["check", "--suite", "moebius", "--seed", "4"], None);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json_of(&a)["result"]["passed"], true);
}
