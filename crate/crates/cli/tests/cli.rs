//! End-to-end checks of the command-line surface: exit codes, output
//! determinism, and the machine-readable formats.

use std::process::Command;

fn qroute() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qroute"))
}

#[test]
fn validate_clean_and_tampered() {
    let out = qroute()
        .args(["validate", "--gen", "two-cliques", "n=4", "bridge=0,1,5,6"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // A malformed file trips the parser with a usage error.
    let dir = std::env::temp_dir().join("qroute-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.graph");
    std::fs::write(&bad, "2 2 0\n0 1\n").unwrap();
    let out = qroute().args(["validate", "--graph", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn effres_on_path() {
    let out = qroute()
        .args(["effres", "--gen", "path", "n=4", "--root", "0", "--marked", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((value - 3.0).abs() < 1e-9);
}

#[test]
fn run_is_deterministic_under_seed() {
    let args = [
        "run",
        "mst",
        "--gen",
        "random",
        "n=20",
        "m=50",
        "weighted=1",
        "--seed",
        "11",
        "--json",
    ];
    let a = qroute().args(args).output().unwrap();
    let b = qroute().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let record: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(record["manifest"]["schema"], "qroute-run-v1");
    assert!(record["ledger"]["messages"]["total"].as_u64().unwrap() > 0);
}

#[test]
fn walk_detect_marked_path_is_nonempty() {
    let out = qroute()
        .args([
            "run",
            "walk-detect",
            "--gen",
            "path",
            "n=5",
            "--root",
            "0",
            "--marked",
            "4",
            "--seed",
            "3",
            "--json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["result"]["verdict"], "NonEmpty");
}

#[test]
fn lb_exit_codes_and_values() {
    let out = qroute().args(["lb", "connectivity", "--n", "5"]).output().unwrap();
    assert!(out.status.success());
    let params: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(params["m_lower"], 625);
    assert_eq!(params["bound"], 5.0);
    // Oversize parameters refuse with exit 3.
    let out = qroute().args(["lb", "connectivity", "--n", "12"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_emits_versioned_csv() {
    let out = qroute()
        .args(["sweep", "mst", "--n", "16,24", "--reps", "1", "--seed", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# schema=qroute-sweep-v1");
    assert!(lines.next().unwrap().starts_with("run_id,algorithm,n,m,seed"));
    assert_eq!(text.lines().filter(|l| l.contains(",mst,")).count(), 2);
}

#[test]
fn disconnected_mst_exits_one() {
    let out = qroute()
        .args(["run", "mst", "--gen", "two-cliques", "n=4", "--seed", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
