mod common;

use std::path::Path;
use std::process::{Command, Output};

use cdi_registry::{to_canonical_json, validate_incident};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;

use common::{fixture, sample};

fn cli(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdi-registry"))
        .arg("--data-dir")
        .arg(data)
        .args(args)
        .env_remove("REGISTRY_DATA_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_long_summary_exits_2_naming_the_rule() {
    let tmp = tempfile::tempdir().unwrap();
    let mut r = sample();
    r.incident_summary = vec!["word"; 251].join(" ");
    let bad = write(tmp.path(), "bad.json", &to_canonical_json(&r));
    let o = cli(tmp.path(), &["validate", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("SUMMARY_TOO_LONG"), "{}", stdout(&o));

    let good = write(tmp.path(), "good.json", &to_canonical_json(&sample()));
    assert_eq!(cli(tmp.path(), &["validate", &good]).status.code(), Some(0));
}

#[test]
fn validate_verdict_matches_core() {
    let tmp = tempfile::tempdir().unwrap();
    // Mix valid records with ones broken in ways the core rejects.
    let strategy = proptest::collection::vec((common::record(), 0usize..6), 48);
    let mut runner = TestRunner::new(Config::default());
    let cases = strategy.new_tree(&mut runner).unwrap().current();
    let mut lines = Vec::new();
    let mut expected = Vec::new();
    for (mut r, breakage) in cases {
        match breakage {
            0 => r.incident_title = " ".into(),
            1 => r.incident_date = "2023-13-01".into(),
            2 => r.incident_severity = Some("Catastrophic".into()),
            3 => r.incident_id = "INC-1".into(),
            _ => {}
        }
        expected.push(validate_incident(&r).is_valid());
        lines.push(String::from_utf8(to_canonical_json(&r)).unwrap());
    }
    assert!(expected.contains(&true) && expected.contains(&false));
    let file = write(tmp.path(), "batch.jsonl", lines.join("\n").as_bytes());
    let o = cli(tmp.path(), &["--json", "validate", &file]);
    let verdicts = json_out(&o);
    let got: Vec<bool> = verdicts.as_array().unwrap().iter().map(|v| v["valid"].as_bool().unwrap()).collect();
    assert_eq!(got, expected);
    let want_exit = if expected.iter().all(|v| *v) { 0 } else { 2 };
    assert_eq!(o.status.code(), Some(want_exit));
}

#[test]
fn validate_reports_parse_errors_per_line() {
    let tmp = tempfile::tempdir().unwrap();
    let good = String::from_utf8(to_canonical_json(&sample())).unwrap();
    let file = write(tmp.path(), "mixed.jsonl", format!("{good}\n{{oops\n\n{good}\n").as_bytes());
    let o = cli(tmp.path(), &["--json", "validate", &file]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    let docs: Vec<u64> = v.as_array().unwrap().iter().map(|d| d["document"].as_u64().unwrap()).collect();
    assert_eq!(docs, [1, 2, 4]);
    assert_eq!(v[1]["error"]["code"], "PARSE_ERROR");
}

#[test]
fn import_aiaaic_reports_coverage() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out.jsonl");
    let report = tmp.path().join("report.json");
    let csv = fixture("aiaaic_sample.csv");
    let o = cli(
        tmp.path(),
        &[
            "import",
            "--source",
            "aiaaic",
            csv.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("coverage 18/26"));
    let jsonl = std::fs::read_to_string(&out).unwrap();
    assert_eq!(jsonl.lines().count(), 20);
    for line in jsonl.lines() {
        let r = cdi_registry::from_canonical_json(line.as_bytes()).unwrap();
        assert!(validate_incident(&r).is_valid());
    }
    let rep: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(rep["coverage"]["derivable"], 18);
    assert_eq!(rep["coverage"]["total"], 26);

    let o = cli(tmp.path(), &["--json", "import", "--source", "aiid", fixture("aiid_sample.csv").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(json_out(&o)["coverage"]["derivable"], 7);
}

#[test]
fn import_with_foreign_header_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = write(tmp.path(), "x.csv", b"Title,Severity\nA,High\n");
    let o = cli(tmp.path(), &["--json", "import", "--source", "aiid", &csv]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "UNKNOWN_HEADER");
}

#[test]
fn query_on_empty_store_is_an_empty_list() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("nothing-here");
    let o = cli(&data, &["query", "--severity", "Critical", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o), serde_json::json!([]));
    assert!(!data.exists(), "a read-only command created the data directory");
}

#[test]
fn workflow_end_to_end_with_json_output() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let record = write(tmp.path(), "r.json", &to_canonical_json(&sample()));

    let o = cli(&data, &["--json", "submit", &record]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let id = json_out(&o)[0]["incident_id"].as_str().unwrap().to_string();

    let o = cli(&data, &["--json", "review", &id, "--reject"]);
    assert_ne!(o.status.code(), Some(0));
    let o = cli(&data, &["--json", "review", &id, "--claim"]);
    assert_eq!(json_out(&o)["state"], "under_review");
    let o = cli(&data, &["--json", "review", &id, "--approve"]);
    assert_eq!(json_out(&o)["state"], "published");
    let o = cli(&data, &["--json", "review", &id, "--approve"]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "ILLEGAL_TRANSITION");

    let public = json_out(&cli(&data, &["--json", "get", &id]));
    assert!(public.get("submitter_email").is_none());
    let full = json_out(&cli(&data, &["--json", "get", &id, "--reviewer"]));
    assert_eq!(full["record"]["submitter_email"], "asha@example.org");

    let hits = json_out(&cli(&data, &["--json", "query", "--harm", "physical", "--sector", "energy"]));
    assert_eq!(hits.as_array().unwrap().len(), 1);
    let o = cli(&data, &["--json", "query", "--severity", "Huge"]);
    assert_eq!(o.status.code(), Some(1));

    let stats = json_out(&cli(&data, &["--json", "stats", "severity"]));
    assert_eq!(stats["incidents"], 1);
    let csv = stdout(&cli(&data, &["stats", "harm_matrix"]));
    assert!(csv.starts_with("harm_kind,Critical,High,Moderate,Low"));
    let trend = json_out(&cli(&data, &["--json", "stats", "trend", "--field", "severity", "--value", "High"]));
    assert!(trend.is_object() || trend.is_array());
    assert_eq!(cli(&data, &["stats", "zodiac"]).status.code(), Some(1));

    let export = cli(&data, &["--json", "export"]);
    let lines: Vec<Value> = stdout(&export).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);

    json_out(&cli(&data, &["--json", "taxonomy"]));
    let s = json_out(&cli(&data, &["--json", "suggest", "grid outage after misconfigured automation"]));
    assert!(!s.as_array().unwrap().is_empty());
}

#[test]
fn usage_and_io_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cli(tmp.path(), &[]).status.code(), Some(1));
    assert_eq!(cli(tmp.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(tmp.path(), &["get", "not-an-id"]).status.code(), Some(1));
    let o = cli(tmp.path(), &["--json", "validate", "/definitely/missing.json"]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "IO_ERROR");
    let o = cli(tmp.path(), &["--json", "serve", "--config", "/definitely/missing.toml"]);
    assert_ne!(o.status.code(), Some(0));
    serde_json::from_slice::<Value>(&o.stderr).expect("JSON error on stderr");
}

#[test]
fn mutating_commands_respect_the_lock() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let held = cdi_registry::Store::open(&data).unwrap();
    let record = write(tmp.path(), "r.json", &to_canonical_json(&sample()));
    let o = cli(&data, &["--json", "submit", &record]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["code"], "LOCKED");
    drop(held);
    assert_eq!(cli(&data, &["submit", &record]).status.code(), Some(0));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn single_document_verdicts_match_core(r in common::record()) {
        let tmp = tempfile::tempdir().unwrap();
        let file = write(tmp.path(), "r.json", &to_canonical_json(&r));
        let o = cli(tmp.path(), &["--json", "validate", &file]);
        let valid = validate_incident(&r).is_valid();
        prop_assert_eq!(o.status.code(), Some(if valid { 0 } else { 2 }));
        prop_assert_eq!(&json_out(&o)[0]["valid"], &Value::Bool(valid));
    }
}
