//! End-to-end checks of the binary: files in, files or JSON out, and the
//! exit code contract (0 ok, 1 failed check, 2 usage, 3 unreadable input).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_valset"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).expect("writable temp dir");
    path.to_string_lossy().into_owned()
}

fn e2l_json() -> &'static str {
    r#"{"version":1,"r":2,"min":[0,0],"conductor":[1,1],"points":[[0,0],[1,1]]}"#
}

fn e3c_json() -> &'static str {
    r#"{"version":1,"r":3,"min":[0,0,0],"conductor":[2,2,2],
        "points":[[0,0,0],[1,1,1],[1,1,2],[1,2,1],[2,1,1],[2,2,2]]}"#
}

fn n3_json() -> &'static str {
    r#"{"version":1,"r":3,"min":[0,0,0],"conductor":[0,0,0],"points":[[0,0,0]]}"#
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn colength_prints_every_route_and_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e2l.json", e2l_json());
    let out = bin()
        .args(["colength", &file, "--gamma", "2,2", "--method", "all"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    for line in ["chain: 3", "saturated: 3", "recursive: 3", "closed: 3"] {
        assert!(text.contains(line), "missing {line:?} in {text}");
    }

    let out = bin()
        .args(["colength", &file, "--gamma", "2,2", "--method", "chain", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed[0]["value"], 3);
    assert_eq!(parsed[0]["method"], "chain");
}

#[test]
fn distance_between_nested_sets() {
    let dir = tempfile::tempdir().unwrap();
    let big = write(dir.path(), "n3.json", n3_json());
    let small = write(dir.path(), "e3c.json", e3c_json());
    let out = bin().args(["distance", &big, &small]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("distance 3 "), "{}", stdout(&out));
}

#[test]
fn corner_below_conductor_is_a_reported_failure() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e2l.json", e2l_json());
    let out = bin()
        .args(["colength", &file, "--gamma", "0,0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "gamma_below_conductor");
}

#[test]
fn exit_codes_for_usage_and_io() {
    let out = bin()
        .args(["validate", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e2l.json", e2l_json());
    let out = bin()
        .args(["colength", &file, "--method", "sideways"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let garbled = write(dir.path(), "junk.json", "{not json");
    let out = bin().args(["validate", &garbled]).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn invalid_set_names_the_broken_rule() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "bad.json",
        r#"{"version":1,"r":2,"min":[0,0],"conductor":[2,2],
            "points":[[0,0],[1,2],[2,1],[2,2]]}"#,
    );
    let out = bin().args(["validate", &file]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("min closure"), "{}", stdout(&out));
    let err: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "invalid");
}

#[test]
fn reconstruct_round_trips_through_the_split_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e3c.json", e3c_json());
    let out = bin().args(["reconstruct", &file]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let split: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(split["r"], 3);
    assert_eq!(split["projections"].as_array().unwrap().len(), 3);
    assert_eq!(split["rm"], serde_json::json!([[1, 1, 1]]));

    let split_file = write(dir.path(), "split.json", &stdout(&out));
    let out = bin().args(["reconstruct", &split_file]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rebuilt: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let original: serde_json::Value = serde_json::from_str(e3c_json()).unwrap();
    assert_eq!(rebuilt["points"], original["points"]);
    assert_eq!(rebuilt["conductor"], original["conductor"]);
}

#[test]
fn ingest_computes_the_set_of_a_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "ideal.json",
        r#"{
            "version": 1, "r": 3, "truncation": 9,
            "ring_generators": [
                [["0","1"], [], ["0","1"]],
                [[], ["0","1"], ["0","1"]]
            ],
            "module_generators": [[["1"], ["1"], ["1"]]]
        }"#,
    );
    let out = bin().args(["ingest", &file]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let set: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let original: serde_json::Value = serde_json::from_str(e3c_json()).unwrap();
    assert_eq!(set["points"], original["points"]);
    assert_eq!(set["conductor"], serde_json::json!([2, 2, 2]));

    // A window too small to settle the conductor is an honest failure.
    let cramped = write(
        dir.path(),
        "cramped.json",
        r#"{
            "version": 1, "r": 2, "truncation": 3,
            "ring_generators": [
                [["0","1"], []],
                [[], ["0","1"]]
            ],
            "module_generators": [[["1"], ["1"]]]
        }"#,
    );
    let out = bin().args(["ingest", &cramped]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_str(&stderr(&out)).unwrap();
    assert_eq!(err["error"]["kind"], "truncation_inconclusive");
}

#[test]
fn fuzz_is_byte_deterministic_and_reports_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for path in [&a, &b] {
        let out = bin()
            .args([
                "fuzz",
                "--count",
                "8",
                "--seed",
                "5",
                "--r",
                "3",
                "--out",
                &path.to_string_lossy(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let text_a = fs::read_to_string(&a).unwrap();
    let text_b = fs::read_to_string(&b).unwrap();
    assert_eq!(text_a, text_b);
    let lines: Vec<&str> = text_a.lines().collect();
    assert_eq!(lines.len(), 8);
    for line in lines {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["status"], "ok", "{line}");
        assert!(row["seed"].is_u64());
    }
}
