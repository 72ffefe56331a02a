use std::path::PathBuf;
use std::process::Command;

use robinson_cli::{run_command, CommandResult, EXIT_EXHAUSTED, EXIT_FAILS, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> CommandResult {
    run_command(args.iter().copied())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv = args.to_vec();
    argv.push("--json");
    let r = run(&argv);
    (r.code, r.json.unwrap_or(Value::Null))
}

#[test]
fn force_reports_not_forced_with_trace() {
    let lo3 = data("lo3.json");
    let r = run(&["force", "--class", &lo3, "--node", "L1", "--formula", "E x. E y. x < y", "--trace"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.report);
    assert!(r.report.starts_with("L1 ⊩ E x0. E x1. x0 < x1: not-forced\n"));
    assert!(r.report.lines().count() > 1);

    let (code, v) = json(&["force", "--class", &lo3, "--node", "L1", "--formula", "E x. E y. x < y"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "not-forced");
    assert_eq!(v["trace"]["clause"], "exists");

    let (_, v) = json(&["force", "--class", &lo3, "--node", "L2", "--formula", "E x. E y. x < y"]);
    assert_eq!(v["verdict"], "forced");
}

#[test]
fn geneq_suite_holds_on_lo3() {
    let r = run(&["check", "--class", &data("lo3.json"), "--suite", "geneq", "--budget", "7"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.report);
    assert!(r.report.starts_with("geneq: holds"));
}

#[test]
fn every_suite_holds_on_the_fork() {
    let (code, v) = json(&["check", "--class", &data("fork.json"), "--suite", "all", "--budget", "5"]);
    assert_eq!(code, EXIT_OK);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["facts", "infgen", "geneq", "excomp", "pi2", "mp", "ra", "oracle"]);
}

#[test]
fn amalgamation_round_trip_is_deterministic() {
    let args = [
        "cohen",
        "amalgamate",
        "--k",
        "2",
        "--families",
        "decide:0,0;pattern:1,11@0",
        "--depth",
        "64",
        "--seed",
        "7",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.report);
    assert_eq!(a.stdout(), b.stdout());
    let cert = a.json.clone().unwrap();
    assert_eq!(cert["output"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, a.stdout()).unwrap();
    let p = path.to_string_lossy();
    let ok = run(&["cohen", "verify", "--certificate", &p]);
    assert_eq!(ok.code, EXIT_OK, "{}", ok.report);

    let mut bad = cert.clone();
    let first = bad["output"][0].as_str().unwrap().to_string();
    let flipped: String = first
        .chars()
        .enumerate()
        .map(|(i, c)| if i == 0 { if c == '0' { '1' } else { '0' } } else { c })
        .collect();
    bad["output"][0] = Value::String(flipped);
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    let rejected = run(&["cohen", "verify", "--certificate", &p]);
    assert_eq!(rejected.code, EXIT_FAILS, "{}", rejected.report);
    assert!(rejected.report.starts_with("certificate rejected"));
}

#[test]
fn exit_codes() {
    let lo12 = data("lo12.json");
    let lo3 = data("lo3.json");

    // 0: success, property holds.
    assert_eq!(run(&["parse", "--formula", "A x. E y. x < y"]).code, EXIT_OK);
    assert_eq!(run(&["generics", "--class", &lo12, "--node", "L2", "--budget", "4"]).code, EXIT_OK);

    // 1: property fails.
    let r = run(&["generics", "--class", &lo12, "--node", "L1", "--budget", "4"]);
    assert_eq!(r.code, EXIT_FAILS);
    assert!(r.report.contains("L1: not generic"));
    let r = run(&["modal", "--class", &lo12, "--node", "L1", "--principle", "mp", "--budget", "5"]);
    assert_eq!(r.code, EXIT_FAILS);
    assert!(r.report.contains("E x0. E x1. x0 < x1"), "{}", r.report);
    assert_eq!(run(&["bfa", "--class", &lo12, "--node", "L1", "--budget", "4"]).code, EXIT_FAILS);

    // 2: usage and parse errors.
    for args in [
        vec!["bogus"],
        vec![],
        vec!["parse", "--formula", "E x. x <"],
        vec!["parse", "--formula", "[] E x. x < x"],
        vec!["force", "--class", &lo3, "--node", "L9", "--formula", "E x. x = x"],
        vec!["force", "--class", "/nonexistent.json", "--node", "L1", "--formula", "E x. x = x"],
        vec!["check", "--class", &lo3, "--suite", "nope"],
        vec!["cohen", "tower", "--k", "2", "--families", "decide:0,0"],
        vec!["cohen", "gen", "--families", "frobnicate:1"],
        vec!["probe", "--class", &lo3],
    ] {
        let r = run(&args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.report);
        assert!(r.stdout().is_empty());
        assert!(!r.stderr().is_empty());
    }

    // 3: resource exhaustion.
    let r = run(&["build-generic", "--class", &lo3, "--node", "L1", "--budget", "5", "--cap", "0"]);
    assert_eq!(r.code, EXIT_EXHAUSTED, "{}", r.report);
    let r = run(&["cohen", "gen", "--families", "pattern:111@10", "--depth", "8"]);
    assert_eq!(r.code, EXIT_EXHAUSTED, "{}", r.report);
}

#[test]
fn eval_and_parse() {
    let lo3 = data("lo3.json");
    let (code, v) = json(&["eval", "--class", &lo3, "--node", "L2", "--formula", "E x. E y. x < y"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["value"], true);
    let (_, v) = json(&["parse", "--formula", "A x. E y. x < y"]);
    assert_eq!(v["class"], "pi2");
    let (_, v) = json(&["parse", "--formula", "E x. x = x", "--class", &lo3]);
    assert_eq!(v["class"], "sigma1");
    let (code, v) = json(&["parse", "--modal", "--formula", "<> [] E x. E y. x < y"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["modal_depth"], 2);
}

#[test]
fn modal_commands() {
    let lo12 = data("lo12.json");
    let (code, v) = json(&["modal", "--class", &lo12, "--formula", "<> E x. E y. x < y"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["values"][0]["value"], true);
    let (code, v) = json(&["modal", "--class", &lo12, "--node", "L2", "--principle", "ra", "--budget", "4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v[0]["holds"], true);
}

#[test]
fn build_generic_walks_to_the_top() {
    let (code, v) = json(&["build-generic", "--class", &data("lo3.json"), "--node", "L1", "--budget", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["end"], "L3");
}

#[test]
fn cohen_gen_and_tower() {
    let (code, v) = json(&["cohen", "gen", "--families", "decide:3;pattern:101@2", "--depth", "16"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["bits"].as_str().unwrap().len(), 16);
    let args = ["cohen", "tower", "--k", "3", "--families", "decide:2,5", "--depth", "32", "--seed", "11"];
    let (code, a) = json(&args);
    let (_, b) = json(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(a, b);
    assert_eq!(a.as_array().unwrap().len(), 3);
    let (_, c) = json(&["cohen", "tower", "--k", "3", "--families", "decide:2,5", "--depth", "32", "--seed", "12"]);
    assert_ne!(a, c);
}

#[test]
fn amalgamate_from_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inputs.json");
    std::fs::write(&path, r#"["01100000"]"#).unwrap();
    let p = path.to_string_lossy();
    let (code, v) = json(&[
        "cohen", "amalgamate", "--inputs", &p, "--families", "decide:0,1;pattern:0,11@0", "--depth", "8", "--seed", "1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["output"][0], "00110000");
    assert_eq!(v["diffs"], serde_json::json!([[1, 3]]));
}

#[test]
fn probe_is_seeded() {
    let fork = data("fork.json");
    let args = ["probe", "--class", &fork, "--length", "2", "--seed", "3", "--json"];
    let a = run(&args);
    assert_eq!(a.stdout(), run(&args).stdout());
    assert_eq!(a.code, EXIT_OK, "{}", a.report);
    assert_eq!(a.json.as_ref().unwrap()["directed"], true);
    let lo3 = data("lo3.json");
    assert_eq!(run(&["probe", "--class", &lo3, "--length", "2", "--seed", "3"]).code, EXIT_OK);
}

#[test]
fn binary_splits_streams() {
    let bin = env!("CARGO_BIN_EXE_robinson");
    let out = Command::new(bin).args(["parse", "--formula", "E x. x = x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("class sigma1"));
    assert!(out.stderr.is_empty());

    let out = Command::new(bin).args(["parse", "--formula", "E x."]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}
