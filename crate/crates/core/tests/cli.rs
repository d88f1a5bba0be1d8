use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn entcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entcert"))
        .args(args)
        .env_remove("ENTCERT_TIMING")
        .env_remove("ENTCERT_TEXT")
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn generate(name: &str, args: &[&str]) -> String {
    let path = scratch(name).to_string_lossy().into_owned();
    let mut full = vec!["generate"];
    full.extend(args);
    full.extend(["-o", &path]);
    assert_eq!(entcert(&full).status.code(), Some(0), "generate {args:?}");
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes_follow_the_verdict() {
    let bell = generate("bell.json", &["bell"]);
    assert_eq!(entcert(&["analyze", &bell]).status.code(), Some(0));
    let werner = generate("werner.json", &["werner", "3", "0.4"]);
    let out = entcert(&["analyze", &werner]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["decided"], Value::Bool(false));
    let missing = entcert(&["analyze", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn bell_state_certificate() {
    let bell = generate("bell2.json", &["bell"]);
    let report = json(&entcert(&["analyze", &bell]));
    let cert = &report["result"]["certificate"];
    assert_eq!(cert["verdict"], "Distillable");
    assert_eq!(cert["payload"]["witness"]["value"].as_f64(), Some(-1.0));
}

#[test]
fn timing_only_when_asked() {
    let tiles = generate("tiles.json", &["upb-tiles"]);
    let plain = entcert(&["analyze", &tiles]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("timing_ms"));
    let timed = entcert(&["--timing", "analyze", &tiles]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timing_ms"));
}

#[test]
fn same_seed_same_bytes() {
    let cb = generate("cb.json", &["--seed", "3", "checkerboard", "--random"]);
    let a = entcert(&["--seed", "4", "analyze", &cb]);
    let b = entcert(&["--seed", "4", "analyze", &cb]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn cubic_example_product_test() {
    let cubic = generate("cubic.json", &["cubic-example"]);
    let report = json(&entcert(&["product-test", &cubic]));
    let text = report.to_string();
    assert!(text.contains("-1.0"), "{text}");
}

#[test]
fn tripartite_fixture_through_the_cli() {
    let ghz = generate("ghz.json", &["ghz", "1,1", "--as-fixture"]);
    let out = entcert(&["analyze", &ghz, "--mode", "tripartite"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Separable"));
}

#[test]
fn text_output_and_out_file() {
    let bell = generate("bell3.json", &["bell"]);
    let dest = scratch("report.txt").to_string_lossy().into_owned();
    let out = entcert(&["--text", "analyze", &bell, "-o", &dest]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&dest).unwrap();
    assert!(text.contains("Distillable"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}

#[test]
fn bad_parameters_are_errors() {
    assert_eq!(entcert(&["generate", "werner", "3"]).status.code(), Some(1));
    assert_eq!(entcert(&["--budget", "0", "analyze", "x.json"]).status.code(), Some(1));
}
