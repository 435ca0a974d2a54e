use std::process::Command;

use serde_json::Value;
use tworibbon_cli::{cmd_code, cmd_h1, cmd_knead, cmd_orbits, parse_order, CodeTarget, Config, Format, EXIT_USAGE};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tworibbon"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).unwrap()
}

#[test]
fn order_token() {
    assert_eq!(parse_order("inf"), Ok(None));
    assert_eq!(parse_order("7"), Ok(Some(7)));
    assert!(parse_order("seven").is_err());
}

#[test]
fn knead_matches_closed_forms() {
    let (code, out, _) = run(&["knead", "3", "4", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("u_L = [a^2 b a^2 b^2]"));
    assert!(out.contains("verdict MATCH"));
    let (code, out, _) = run(&["knead", "2", "3", "7"]);
    assert_eq!(code, 0);
    assert!(out.contains("u_L = [a b a b a b^2]"));
}

#[test]
fn non_hyperbolic_is_a_usage_error() {
    let (code, _, err) = run(&["knead", "2", "4", "4"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not hyperbolic"));
    let err = cmd_knead(&Config::new(2, 3, Some(6))).unwrap_err();
    assert_eq!(err.code(), EXIT_USAGE);
}

#[test]
fn orbit_lists() {
    let v = json(&["orbits", "3", "4", "5", "--max-blocks", "2"]);
    assert_eq!(v["schema"], 1);
    let words: Vec<&str> = v["orbits"].as_array().unwrap().iter().map(|o| o["word"].as_str().unwrap()).collect();
    assert!(words.contains(&"<a b>") && words.contains(&"<a^2 b^3>"));
    assert!(!words.contains(&"<a^2 b>"));
    let v = json(&["orbits", "3", "4", "5", "--max-blocks", "8"]);
    let exceptional: Vec<&Value> = v["orbits"].as_array().unwrap().iter().filter(|o| o["exceptional"] == true).collect();
    assert_eq!(exceptional.len(), 1);
    assert_eq!(exceptional[0]["secondary"], "<a b^2 a b^3>");
    let v = json(&["orbits", "3", "4", "inf", "--max-blocks", "2"]);
    assert_eq!(v["params"]["r"], "inf");
    assert_eq!(v["count"], 4);
}

#[test]
fn code_recovers_the_orbit_from_its_axis() {
    let mut cfg = Config::new(3, 4, Some(5));
    cfg.max_blocks = 2;
    let list: Value = serde_json::from_str(&cmd_orbits(&cfg).unwrap().text).unwrap();
    let ab = list["orbits"].as_array().unwrap().iter().find(|o| o["word"] == "<a b>").unwrap();
    let target = CodeTarget::Angles {
        eta: ab["repelling"].as_f64().unwrap(),
        xi: ab["attracting"].as_f64().unwrap(),
    };
    let v: Value = serde_json::from_str(&cmd_code(&cfg, &target).unwrap().text).unwrap();
    assert_eq!(v["certificate"], "<a b>");
    let v = json(&["code", "3", "4", "5", "--word", "<a^2 b^3>"]);
    assert_eq!(v["certificate"], "<a^2 b^3>");
}

#[test]
fn code_for_generic_points_reports_a_window() {
    let v = json(&["code", "3", "4", "5", "--eta", "0.3", "--xi", "2.5"]);
    assert_eq!(v["certificate"], Value::Null);
    assert!(!v["code"].as_str().unwrap().is_empty());
    assert!(v["merged_pairs"].as_u64().unwrap() >= 1);
}

#[test]
fn equal_endpoints_exit_2() {
    let (code, _, err) = run(&["code", "3", "4", "5", "--eta", "1", "--xi", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("coincide"));
}

#[test]
fn homology() {
    let v = json(&["h1", "2", "3", "7"]);
    assert_eq!(v["order"], "1");
    let mut cfg = Config::new(3, 4, Some(5));
    cfg.format = Some(Format::Text);
    assert_eq!(cmd_h1(&cfg).unwrap().text, "H1 = Z/13\n");
}

#[test]
fn render_writes_valid_svg() {
    let dir = std::env::temp_dir().join(format!("tworibbon-render-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.svg");
    let (code, _, err) = run(&["render", "3", "4", "5", "--depth", "3", "--overlay", "bigon", "-o", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let svg = std::fs::read_to_string(&path).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert!(doc.descendants().any(|n| n.attribute("id") == Some("bigon")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bigon_needs_finite_faces() {
    let (code, _, _) = run(&["render", "3", "4", "inf", "--overlay", "bigon"]);
    assert_eq!(code, 1);
}

#[test]
fn verify_passes() {
    let (code, out, _) = run(&["verify", "3", "4", "5"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().count(), 8);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn graph_export() {
    let v = json(&["graph", "3", "4", "5", "--depth", "1"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 7);
    assert_eq!(v["edges"].as_array().unwrap().len(), 6);
}
