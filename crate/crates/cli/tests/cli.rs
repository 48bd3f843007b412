//! End-to-end tests of the command-line interface: golden outputs for the
//! displayed symbol identities, table caching and idempotence, verification
//! exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vertexalg"))
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).expect("golden file")
}

#[test]
fn psido_mul_matches_golden() {
    let out = bin().args(["psido", "mul", "--trunc", "2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        golden("psido_mul_trunc2.txt")
    );
}

#[test]
fn psido_inv_matches_golden() {
    let out = bin().args(["psido", "inv", "--trunc", "2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        golden("psido_inv_trunc2.txt")
    );
}

#[test]
fn psido_roundtrip_is_identity() {
    let out = bin()
        .args(["psido", "roundtrip", "--trunc", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("identity up to truncation 4"));
}

#[test]
fn usage_error_exits_2() {
    let out = bin().args(["psido", "frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_build_cache_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("table.json");
    let cache = dir.path().join("cache");
    let run = |extra: &[&str]| {
        let mut cmd = bin();
        cmd.args([
            "table",
            "--pair-cutoff",
            "2",
            "--weight-cutoff",
            "2",
            "--out",
            out_path.to_str().unwrap(),
            "--cache-dir",
            cache.to_str().unwrap(),
        ]);
        cmd.args(extra);
        cmd.output().unwrap()
    };
    let first = run(&[]);
    assert!(first.status.success(), "{:?}", first);
    let built = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(built, golden("table_pairs2.json"));

    // second run is a cache hit and byte-identical
    let second = run(&[]);
    assert!(second.status.success());
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), built);

    // corrupted cache entries are rejected, not silently rebuilt
    let cache_file = std::fs::read_dir(&cache)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let mut text = std::fs::read_to_string(&cache_file).unwrap();
    text = text.replace("\"c\": \"1\"", "\"c\": \"2\"");
    std::fs::write(&cache_file, text).unwrap();
    let third = run(&[]);
    assert_eq!(third.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&third.stderr).contains("corrupted"));

    // --force rebuilds over it
    let fourth = run(&["--force"]);
    assert!(fourth.status.success());
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), built);
}

#[test]
fn verify_parameters_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = bin()
        .args([
            "verify",
            "--suite",
            "parameters",
            "--json",
            json_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("suite parameters ... PASS"));
    assert!(text.contains("overall: PASS"));

    // the report renderer accepts the JSON artifact
    let rep = bin()
        .args(["report", json_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(rep.status.success());
    assert!(String::from_utf8_lossy(&rep.stdout).contains("PASS"));
}

#[test]
fn verify_json_format() {
    let out = bin()
        .args(["verify", "--suite", "parameters", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    assert_eq!(value["passed"], serde_json::Value::Bool(true));
}

#[test]
fn report_validates_table_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, golden("table_pairs2.json")).unwrap();
    let out = bin().args(["report", path.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("entries: 2"));
    assert!(text.contains("(verified)"));
}
