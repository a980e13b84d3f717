use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sunit(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sunit"))
        .args(args)
        .env("SUNIT_CACHE_DIR", cache)
        // unroutable: any accidental network access fails fast
        .env("LMFDB_BASE_URL", "http://127.0.0.1:9")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{e}: {l}")))
        .collect()
}

#[test]
fn solve_golden_ratio_field() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sunit(&["solve", "--field", "quad:5", "--bound", "6"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines = json_lines(&o);
    let head = &lines[0];
    assert_eq!(head["schema"], "solve/v1");
    assert_eq!(head["rank"], 2);
    assert_eq!(head["count"].as_u64().unwrap() as usize, lines.len() - 1);
    // phi^-1 = (sqrt5 - 1)/2 = w - 1 with w = (1 + sqrt5)/2
    assert!(lines[1..].iter().any(|l| l["lambda"] == serde_json::json!(["-1", "1"])));
}

#[test]
fn classify_conductor_thirty_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sunit(&["classify-2L", "--L", "31"], tmp.path());
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["status"], "curve-exists");
    assert_eq!(v["witness"], "1+31=32");
    let o = sunit(&["classify-2L", "--L", "13"], tmp.path());
    assert_eq!(json_lines(&o)[0]["status"], "no-curve");
}

#[test]
fn serre_mazur_offline() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sunit(&["serre-mazur", "--L", "3", "--offline"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_lines(&o)[0]["status"], "empty-level");
    let o = sunit(&["serre-mazur", "--L", "37", "--offline"], tmp.path());
    let v = &json_lines(&o)[0];
    assert_eq!(v["status"], "bounded");
    assert_eq!(v["bound"], 19);
    // no fixture for level 2*101 and the network is off
    let o = sunit(&["serre-mazur", "--L", "101", "--offline"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes_follow_the_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| sunit(args, tmp.path()).status.code();
    assert_eq!(code(&["criteria", "--field", "quad:2", "--bound", "6"]), Some(0));
    assert_eq!(code(&["criteria", "--field", "quad:-7", "--bound", "6"]), Some(2));
    assert_eq!(code(&["criteria", "--field", "quad:5", "--bound", "6"]), Some(3));
    assert_eq!(code(&["criteria", "--layer", "3,1"]), Some(3));
    assert_eq!(code(&["criteria", "--field", "quad:4"]), Some(1));
    assert_eq!(code(&["solve", "--field", "nonsense"]), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bound": 3, "threads": 1, "offline": true}"#).unwrap();
    let o = sunit(&["--config", cfg.to_str().unwrap(), "solve", "--field", "Q", "--s", "above:2,3"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json_lines(&o)[0]["bound"], 3);
    // the command line wins over the file
    let o = sunit(&["--config", cfg.to_str().unwrap(), "--bound", "5", "solve", "--field", "Q", "--s", "above:2,3"], tmp.path());
    assert_eq!(json_lines(&o)[0]["bound"], 5);
    std::fs::write(&cfg, r#"{"bound": 3, "colour": "blue"}"#).unwrap();
    let o = sunit(&["--config", cfg.to_str().unwrap(), "solve", "--field", "Q"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn warm_cache_offline_then_hits() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sunit(&["warm-cache", "--levels", "2,6,74", "--offline"], tmp.path());
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["summary"]["fetched"], 3);
    assert_eq!(v["summary"]["entries"], serde_json::json!([[2, 0], [6, 0], [74, 2]]));
    let o = sunit(&["warm-cache", "--levels", "2,6,74", "--offline"], tmp.path());
    assert_eq!(json_lines(&o)[0]["summary"]["hits"], 3);
    let o = sunit(&["warm-cache", "--levels", "74", "--offline", "--purge"], tmp.path());
    let v = &json_lines(&o)[0];
    assert_eq!((v["purged"].as_u64(), v["summary"]["fetched"].as_u64()), (Some(3), Some(1)));
}

#[test]
fn density_classify_only() {
    let tmp = tempfile::tempdir().unwrap();
    let o = sunit(&["density", "--x", "100", "--family", "imaginary", "--classify-only"], tmp.path());
    assert!(o.status.success());
    let v = &json_lines(&o)[0];
    assert_eq!(v["schema"], "density-report/v1");
    assert_eq!(v["total"], 61);
}
