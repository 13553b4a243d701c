use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn evlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evlab")).args(args).output().expect("evlab runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn analyze_reports_depth_and_envelope() {
    let out = evlab(&["analyze", "--formula", "(x1&x2)|(x3&x4)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "analyze");
    assert_eq!(v["results"]["D"], 4);
    assert_eq!(v["results"]["evasive"], true);
}

#[test]
fn swbound_and_dr_agree_on_worked_example() {
    let sw = json(&evlab(&["swbound", "--formula", "(x1|x2)&(x3|x4)"]));
    assert_eq!(sw["results"]["l0"], "11/4");
    assert_eq!(sw["results"]["l1"], "3");
    let dr = json(&evlab(&["dr", "--formula", "(x1|x2)&(x3|x4)"]));
    assert_eq!(dr["results"]["value"], "3");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(evlab(&["simulate", "--k", "2"]).status.code(), Some(2));
    assert_eq!(evlab(&["analyze"]).status.code(), Some(2));
    assert_eq!(evlab(&["frobnicate"]).status.code(), Some(2));
    let g = scratch("one_edge.json", r#"{"kind":"bipartite","n":2,"edges":[[1,1]]}"#);
    let g = g.to_str().unwrap();
    assert_eq!(evlab(&["pack", "--g1", g, "--g2", g, "--method", "swaps"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one_with_json() {
    let out = evlab(&["analyze", "--formula", "x1 & (x2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["error"]["kind"].is_string());
    let out = evlab(&["pipeline", "--property", "no-such-property", "--size", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let bad = scratch("bad.json", "{\"kind\": \"bipartite\", \"n\": 2,\n \"edges\": [[1, 9]]}");
    let out = evlab(&["pack", "--g1", bad.to_str().unwrap(), "--g2", bad.to_str().unwrap(), "--method", "conditions"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn pack_reports_local_minimum_for_star_against_matching() {
    let star = scratch("star.json", r#"{"kind":"bipartite","n":3,"edges":[[1,1],[1,2],[1,3]]}"#);
    let matching = scratch("matching.json", r#"{"kind":"bipartite","n":3,"edges":[[1,1],[2,2],[3,3]]}"#);
    let args = ["pack", "--g1", star.to_str().unwrap(), "--g2", matching.to_str().unwrap(), "--seed", "1"];
    let v = json(&evlab(&args));
    assert_eq!(v["results"]["packing"]["outcome"], "local_min");
    let mut exhaustive = args.to_vec();
    exhaustive.extend(["--method", "exhaustive"]);
    let v = json(&evlab(&exhaustive));
    assert_eq!(v["results"]["packing"]["outcome"], "exhausted");
}

#[test]
fn batch_preserves_order_and_isolates_failures() {
    let manifest = scratch(
        "manifest.json",
        r#"{"jobs": [
            {"args": ["analyze", "--formula", "x1&x2"]},
            {"args": ["analyze", "--formula", "x1 &"]},
            {"args": ["recurrence", "--k", "3"]},
            {"args": ["batch", "--manifest", "x.json"]}
        ]}"#,
    );
    let out = evlab(&["batch", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["jobs"], 4);
    assert_eq!(r["succeeded"], 2);
    assert_eq!(r["failed"], 2);
    let records = r["records"].as_array().unwrap();
    assert_eq!(records[0]["status"], "ok");
    assert_eq!(records[0]["report"]["results"]["D"], 2);
    assert_eq!(records[1]["exit_code"], 1);
    assert!(records[2]["text"].as_str().unwrap().starts_with("k,a_k,b_k"));
    assert_ne!(records[3]["status"], "ok");
    let seq = evlab(&["--sequential", "batch", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(seq.stdout, out.stdout);
}

#[test]
fn malformed_manifest_is_a_domain_error() {
    let manifest = scratch("broken.json", "{\"jobs\": [");
    assert_eq!(evlab(&["batch", "--manifest", manifest.to_str().unwrap()]).status.code(), Some(1));
}
