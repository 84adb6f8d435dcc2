use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const WORKSPACE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/workspace.json");

fn dgtor(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgtor"))
        .args(args)
        .env("DGTOR_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exit_codes() {
    let cache = tempfile::tempdir().unwrap();
    let c = cache.path();
    assert_eq!(code(&dgtor(&["validate", WORKSPACE], c)), 0);
    assert_eq!(code(&dgtor(&["flat", WORKSPACE, "A"], c)), 0);
    assert_eq!(code(&dgtor(&["flat", WORKSPACE, "k", "--window", "3"], c)), 1);
    assert_eq!(code(&dgtor(&["strong", WORKSPACE, "kx"], c)), 1);
    assert_eq!(code(&dgtor(&["postnikov", WORKSPACE, "k"], c)), 0);
    let missing = dgtor(&["homology", "/nonexistent/ws.json", "k"], c);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("/nonexistent/ws.json"), "{}", stderr(&missing));
    let unknown = dgtor(&["homology", WORKSPACE, "nope"], c);
    assert_eq!(code(&unknown), 2);
    assert!(stderr(&unknown).contains("unknown module 'nope'"));
    assert_eq!(code(&dgtor(&["tor", WORKSPACE], c)), 2);
    assert_eq!(code(&dgtor(&["--help"], c)), 0);
}

#[test]
fn json_reports_are_deterministic() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["--json", "--seed", "5", "equiv", WORKSPACE, "k"];
    let first = dgtor(&args, cache.path());
    let second = dgtor(&args, cache.path());
    assert_eq!(first.stdout, second.stdout);
    let report: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(report["exit_code"], code(&first));

    let args = ["--json", "tor-ss", WORKSPACE, "k", "k"];
    let first = dgtor(&args, cache.path());
    assert_eq!(first.stdout, dgtor(&args, cache.path()).stdout);
    let report: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["window"], 5);
}

#[test]
fn text_output_shows_the_grids() {
    let cache = tempfile::tempdir().unwrap();
    let out = dgtor(&["tor", WORKSPACE, "k", "k"], cache.path());
    assert_eq!(code(&out), 0);
    // Tor_p(k, k) over k[e] is one-dimensional in internal degree 0 for every p
    let text = stdout(&out);
    let row = |q: &str| text.lines().find(|l| l.trim_start().starts_with(&format!("{q} |"))).unwrap().to_string();
    assert_eq!(row("0").split_whitespace().skip(2).collect::<Vec<_>>(), vec!["1"; 6]);
    assert!(row("1").split_whitespace().skip(2).all(|c| c == "."));
}

#[test]
fn validate_names_the_broken_pair() {
    let dir = tempfile::tempdir().unwrap();
    let mut ws: Value = serde_json::from_str(&std::fs::read_to_string(WORKSPACE).unwrap()).unwrap();
    // e·1 = 2e while 1·e = e
    ws["algebras"]["eps"]["products"][2]["value"] = serde_json::json!([[1, "2"]]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&ws).unwrap()).unwrap();
    let out = dgtor(&["validate", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("algebra 'eps'") && err.contains("commutativity"), "{err}");

    let out = dgtor(&["--json", "validate", bad.to_str().unwrap()], dir.path());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["exit_code"], 2);
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    let first = dgtor(&["--json", "dtensor", WORKSPACE, "k", "k"], c);
    assert_eq!(code(&first), 0);
    let again = dgtor(&["--json", "dtensor", WORKSPACE, "k", "k"], c);
    assert_eq!(first.stdout, again.stdout);

    let list: Value = serde_json::from_slice(&dgtor(&["--json", "cache", "list"], c).stdout).unwrap();
    let entries = list["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    let key = entries[0]["key"].as_str().unwrap();
    assert_eq!(code(&dgtor(&["cache", "verify"], c)), 0);

    // flip one digit inside the stored payload
    let path = c.join(format!("{key}.json"));
    let mut bytes = std::fs::read(&path).unwrap();
    let at = bytes.iter().rposition(|&b| b == b'1').unwrap();
    bytes[at] = b'3';
    std::fs::write(&path, bytes).unwrap();
    let verify = dgtor(&["--json", "cache", "verify"], c);
    assert_eq!(code(&verify), 1);
    let report: Value = serde_json::from_slice(&verify.stdout).unwrap();
    assert_eq!(report["result"]["entries"][0]["evicted"], true);
    assert!(!path.exists());

    // a recomputed entry gives the same answer
    assert_eq!(dgtor(&["--json", "dtensor", WORKSPACE, "k", "k"], c).stdout, first.stdout);
    let cleared = dgtor(&["cache", "clear"], c);
    assert_eq!(code(&cleared), 0);
    let list: Value = serde_json::from_slice(&dgtor(&["--json", "cache", "list"], c).stdout).unwrap();
    assert!(list["result"]["entries"].as_array().unwrap().is_empty());
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["--json", "homology", WORKSPACE, "k"];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dgtor").chain(args).map(String::from).collect();
    let code_in = dgtor_cli::main_with(argv, &mut out, &mut err);
    let bin = dgtor(&args, cache.path());
    assert_eq!(code_in, code(&bin));
    assert_eq!(out, bin.stdout);
}

#[test]
fn workspace_file_round_trips() {
    let ws = dgtor::io::load(Path::new(WORKSPACE)).unwrap();
    let text = dgtor::io::to_json(&ws).unwrap();
    let again = dgtor::io::parse(&text).unwrap();
    assert_eq!(dgtor::io::to_json(&again).unwrap(), text);
    assert_eq!(again.module("k").unwrap(), ws.module("k").unwrap());
}
