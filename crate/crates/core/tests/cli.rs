use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_torsion-forge"));
    c.env_remove("TORSION_FORGE_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn count_small_instance() {
    let out = run(&["count", "--p", "3", "--m", "1", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["count"], "16");
}

#[test]
fn report_has_fixed_top_level_keys() {
    let v = json(&run(&["mult", "--p", "3", "--m", "2"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "diagnostics", "params", "results", "seed", "timings", "version"]);
    assert_eq!(v["command"], "mult");
}

#[test]
fn exit_codes() {
    // Inadmissible family member.
    assert_eq!(run(&["rank", "--p", "5", "--ell", "2", "--m", "2"]).status.code(), Some(2));
    // Unknown flag.
    assert_eq!(run(&["rank", "--p", "5", "--bogus"]).status.code(), Some(2));
    // Counting over budget.
    let out = run(&["--budget", "1024", "mult", "--p", "5", "--m", "6", "--mode", "count"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    // Budget below the floor is a usage error.
    assert_eq!(run(&["--budget", "5", "mult", "--p", "3", "--m", "1"]).status.code(), Some(2));
}

#[test]
fn budget_from_environment() {
    let out = bin()
        .env("TORSION_FORGE_BUDGET", "1024")
        .args(["mult", "--p", "5", "--m", "6", "--mode", "count"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // An explicit flag wins over the environment.
    let out = bin()
        .env("TORSION_FORGE_BUDGET", "1024")
        .args(["--budget", "4096", "count", "--p", "3", "--m", "1", "--s", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["params"]["budget"], "4096");
}

#[test]
fn deterministic_apart_from_timings() {
    for args in [
        &["--seed", "11", "verify", "--suite", "jacobian"][..],
        &["rank", "--p", "5", "--ell", "3", "--m", "2"][..],
    ] {
        let a = strip_timings(json(&run(args)));
        let b = strip_timings(json(&run(args)));
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn csv_only_for_table() {
    let out = run(&["--format", "csv", "rank", "--p", "5", "--ell", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["--format", "csv", "table", "--p", "5", "--ell", "3", "--m-list", "2,1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], torsion_forge::cli::CSV_HEADER);
    let exact: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&exact[..3], ["5", "3", "2"]);
    assert_eq!(exact[6], "exact");
    assert_eq!(exact[8], "156");
    let interval: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(interval[6], "interval");
    assert_eq!(interval[8], "");
    assert_eq!(interval.len(), exact.len());
}

#[test]
fn out_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rank.json");
    std::fs::write(&path, "stale").unwrap();
    let out = run(&["--out", path.to_str().unwrap(), "rank", "--p", "5", "--ell", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["rank"], "156");
    // Nothing but the report is left behind in the directory.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let missing = dir.path().join("no/such/dir/x.json");
    let out = run(&["--out", missing.to_str().unwrap(), "count", "--p", "3", "--m", "1", "--s", "1"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn verify_suite_passes() {
    let out = run(&["verify", "--suite", "eigen"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["results"]["passed"], true);
}
