use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goalval"))
        .args(args)
        .env("GOALVAL_CACHE", cache)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cache_round_trip_keeps_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let first = json(&run(&cache, &["gamma", "--family", "kofn", "--k", "2", "--n", "3"]));
    assert_eq!(first["gamma"], 4);
    assert_eq!(first["provenance"], "ilp");
    assert_eq!(first["cached"], false);
    let second = json(&run(&cache, &["gamma", "--family", "kofn", "--k", "2", "--n", "3"]));
    assert_eq!(second["gamma"], 4);
    assert_eq!(second["provenance"], "ilp");
    assert_eq!(second["cached"], true);

    let ro = json(&run(&cache, &["gamma", "--readonce", "(x1&x2)|(x3&x4)"]));
    assert_eq!((ro["gamma"].as_u64(), ro["provenance"].as_str()), (Some(8), Some("readonce-formula")));
    let ro = json(&run(&cache, &["gamma", "--readonce", "(x1&x2)|(x3&x4)"]));
    assert_eq!((ro["cached"].as_bool(), ro["provenance"].as_str()), (Some(true), Some("readonce-formula")));

    let lines = std::fs::read_to_string(&cache).unwrap();
    let provs: Vec<String> = lines
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["provenance"].as_str().unwrap().to_owned())
        .collect();
    assert!(provs.contains(&"ilp".into()) && provs.contains(&"readonce-formula".into()));
}

#[test]
fn negated_function_reads_swapped_k_values() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    let and0 = json(&run(&cache, &["kgamma", "--family", "and", "--n", "3", "--side", "0"]));
    assert_eq!(and0["gamma"], 1);
    // ~AND3 is f = 7f; its 1-goal value is AND3's 0-goal value
    let nand1 = json(&run(&cache, &["kgamma", "--hex", "7f", "--n", "3", "--side", "1"]));
    assert_eq!(nand1["gamma"], 1);
    assert_eq!(nand1["cached"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    assert_eq!(run(&cache, &["gamma", "--family", "and", "--n", "2"]).status.code(), Some(0));
    assert_eq!(run(&cache, &["gamma", "--hex", "zz", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&cache, &["gamma", "--family", "kofn", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&cache, &["gamma"]).status.code(), Some(1));
    let out = run(&cache, &["gamma", "--family", "triples", "--n", "6", "--budget", "1", "--no-cache"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let b = &v["bounds"];
    assert!(b[0].as_u64().unwrap() >= 6 && b[1].as_u64().unwrap() <= 18);
}

#[test]
fn subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.jsonl");
    let v = json(&run(&cache, &["verify", "--family", "and", "--n", "2", "--recipe", "and"]));
    assert_eq!(v["goal_status"]["q"], 2);
    let v = json(&run(&cache, &["construct", "--family", "xor", "--n", "2", "--recipe", "xor"]));
    assert_eq!(v["table"]["values"].as_array().unwrap().len(), 9);
    let v = json(&run(&cache, &["recover", "--family", "xor", "--n", "3"]));
    assert_eq!((v["queries"].as_u64(), v["matches_input"].as_bool()), (Some(8), Some(true)));
    let v = json(&run(&cache, &["simulate", "--family", "and", "--n", "2", "--recipe", "and"]));
    assert_eq!(v["greedy_cost"], "3/2");
    assert_eq!(v["report"]["passed"], true);
    let v = json(&run(&cache, &["tree", "--family", "kofn", "--k", "2", "--n", "3"]));
    assert_eq!(v["list_computes_f"], true);
    assert_eq!(v["ptf_computes_f"], true);
    let v = json(&run(&cache, &["dscs", "--readonce", "(x1&x2)|x3"]));
    assert_eq!((v["ds"].as_u64(), v["cs"].as_u64()), (Some(2), Some(2)));
    let v = json(&run(&cache, &["stats", "--n", "3"]));
    assert_eq!((v["variables"].as_u64(), v["constraints"].as_u64()), (Some(28), Some(117)));
    let v = json(&run(&cache, &["count-classes", "--n", "3"]));
    assert_eq!(v["enumerated"], 30);
    let out = run(&cache, &["export-lp", "--family", "and", "--n", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Minimize") && text.trim_end().ends_with("End"));
}

#[test]
fn simulate_from_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    std::fs::write(&path, r#"{"f": "8", "n": 2, "costs": ["5", "1"], "goal": {"recipe": "and"}}"#).unwrap();
    let v = json(&run(&dir.path().join("c.jsonl"), &["simulate", "--instance", path.to_str().unwrap()]));
    assert_eq!(v["greedy_cost"], "7/2");
    assert_eq!(v["tree"]["var"], 2);
}
