//! End-to-end runs of the `ftsp` binary.

mod common;

use std::fs;
use std::path::Path;

use common::ftsp;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_verify_steane() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftsp(&["synth", "--code", "steane", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "c1.txt",
        "c2.txt",
        "c3.txt",
        "c4.txt",
        "protocol.txt",
        "metrics.json",
        "synth.manifest.json",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let code = ftsp::code::registry_lookup("steane").unwrap();
    for i in 1..=4 {
        let c = ftsp::PrepCircuit::parse(&fs::read_to_string(dir.path().join(format!("c{i}.txt"))).unwrap()).unwrap();
        assert!(c.verify_prepares(&code));
    }
    let out = ftsp(&["verify", "--code", "steane", "--dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["conditions"].as_array().unwrap().len(), 3);
}

#[test]
fn unknown_code_lists_names() {
    let out = ftsp(&["synth", "--code", "nonexistent"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("steane") && err.contains("cc_4_8_8_17"), "{err}");
}

#[test]
fn wrong_state_skips_distinctness() {
    let dir = tempfile::tempdir().unwrap();
    // the all-|0> product state is not a code state
    let mut text = String::from("QUBITS 7\n");
    for q in 0..7 {
        text.push_str(&format!("INIT {q} Z\n"));
    }
    let paths: Vec<String> = (1..=4)
        .map(|i| {
            let path = dir.path().join(format!("c{i}.txt"));
            fs::write(&path, &text).unwrap();
            path.to_str().unwrap().to_string()
        })
        .collect();
    let mut args = vec!["verify", "--code", "steane", "--circuits"];
    args.extend(paths.iter().map(String::as_str));
    let out = ftsp(&args);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["prepares"][0], false);
    assert!(report["conditions"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_circuit_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "QUBITS 7\nCX 0 0\n").unwrap();
    let b = p(&bad);
    let out = ftsp(&["verify", "--code", "steane", "--circuits", b, b, b, b]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt"));
}

#[test]
fn simulate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftsp(&[
        "simulate",
        "--code",
        "steane",
        "--p",
        "0,1e-3",
        "--shots",
        "20000",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows[..2] {
        assert_eq!((r[1], r[3], r[4], r[5]), ("0.0", "20000", "0", "1.0"));
    }
    let r_a: f64 = rows[2][5].parse().unwrap();
    assert!(r_a > 0.0 && r_a <= 1.0);
    assert!(dir.path().join("simulate.manifest.json").is_file());
}

#[test]
fn simulate_refuses_unverified_quadruple() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftsp(&["synth", "--code", "cc_4_8_8_17", "--baseline", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let args = [
        "simulate",
        "--code",
        "cc_4_8_8_17",
        "--dir",
        p(dir.path()),
        "--p",
        "1e-3",
        "--shots",
        "100",
    ];
    assert_eq!(ftsp(&args).status.code(), Some(1));
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(ftsp(&forced).status.code(), Some(0));
}

#[test]
fn inject_steane() {
    for t in ["0", "1", "2"] {
        let out = ftsp(&["inject", "--code", "steane", "--max-faults", t]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "t={t}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["exhaustive"]["counterexample_count"], 0);
    }
    let out = ftsp(&["inject", "--code", "steane", "--max-faults", "2", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = ftsp(&["synth", "--code", "cc_4_8_8_17", "--seed", "7", "--out", p(d.path())]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["c1.txt", "c2.txt", "c3.txt", "c4.txt", "protocol.txt", "metrics.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"max_restarts": 3, "seed": 5}"#).unwrap();
    let out = ftsp(&["synth", "--code", "steane", "--config", p(&cfg), "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("synth.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["max_restarts"], 3);
    assert_eq!(manifest["seed"], 5);
    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        ftsp(&["synth", "--code", "steane", "--config", p(&cfg)]).status.code(),
        Some(2)
    );
}
