use std::process::Command;

use succinct_harness::bench::CSV_HEADER;

#[test]
fn fuzz_writes_json_and_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("fuzz.json");
    let out = Command::new(env!("CARGO_BIN_EXE_fuzz"))
        .args(["--suite", "walk", "--seed", "7", "--json"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("failures=0"));

    let reports: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["suite"], "walk");
    assert_eq!(reports[0]["failure_count"], 0);
    assert!(reports[0]["assertions"].as_u64().unwrap() > 0);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(["--suite", "select", "--sizes", "20000", "--warmup-ms", "5", "--iters", "2000"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.len() == CSV_HEADER.len()));
}

#[test]
fn bench_rejects_too_few_reps() {
    let out = Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(["--suite", "space", "--sizes", "1000", "--reps", "2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
