use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rough_dematel::crisp::crisp_dematel;
use rough_dematel::dematel::Group;
use rough_dematel::ingest::{parse_expert_csv, parse_study_bundle, StudyData};
use rough_dematel::rough::Scale;

const ENV_VARS: &[&str] = &[
    "RDEMATEL_TAU",
    "RDEMATEL_ENVELOPE",
    "RDEMATEL_CRISPIFY",
    "RDEMATEL_THRESHOLD",
    "RDEMATEL_INCLUDE_DIAGONAL",
    "RDEMATEL_OUT",
    "RDEMATEL_CRITERIA",
    "RDEMATEL_EXPERTS",
    "RDEMATEL_SEED",
    "RDEMATEL_UNANIMOUS",
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn rdematel(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rdematel"));
    for v in ENV_VARS {
        cmd.env_remove(v);
    }
    cmd.args(args)
        .envs(env.iter().copied())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rank column of a weights CSV, in row order.
fn ranks(csv: &str) -> Vec<String> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect()
}

#[test]
fn validate_shipped_fixtures() {
    let o = rdematel(&["validate", path_str(&fixture("barrier_study.json"))], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("7 criteria, 21 respondents, aggregate mode"));

    let o = rdematel(&["validate", path_str(&fixture("first_expert.csv"))], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = rdematel(&["validate", path_str(&fixture("synthetic_21.json"))], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("raw mode"));
}

#[test]
fn validate_reports_the_bad_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_slice(&fs::read(fixture("synthetic_21.json")).unwrap()).unwrap();
    doc["matrices"]["R3"][1][3] = 5.into();
    let path = dir.path().join("bad.json");
    fs::write(&path, doc.to_string()).unwrap();
    let o = rdematel(&["validate", path_str(&path)], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("matrices.R3[1][3]: value 5 outside scale"),
        "{err}"
    );
}

#[test]
fn validate_missing_file_is_io_failure() {
    let o = rdematel(&["validate", "/nonexistent/bundle.json"], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn first_expert_csv_reads_back() {
    let parsed = parse_expert_csv(
        &fs::read(fixture("first_expert.csv")).unwrap(),
        "R1",
        &Scale::default(),
    )
    .unwrap();
    assert_eq!(parsed.criteria, ["I1", "I2", "I3", "I4", "E1", "E2", "E3"]);
    assert_eq!(parsed.matrix.get(0, 1).value(), 4);
}

#[test]
fn analyze_writes_identical_files_twice() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let bundle = fixture("barrier_study.json");
    for d in [&a, &b] {
        let o = rdematel(
            &["analyze", path_str(&bundle), "--out", path_str(d.path())],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in [
        "report.json",
        "prominence.csv",
        "weights.csv",
        "causal.csv",
        "network.dot",
    ] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    let config = &report["config"];
    assert_eq!(config["tau_strategy"], "max-total-sum");
    assert_eq!(config["crispify"], "midpoint");
    assert_eq!(config["threshold_mode"]["mode"], "mean-sigma");
    assert_eq!(config["k"], 1.0);
    assert!(config["q"].as_f64().unwrap() > 0.18);
}

#[test]
fn analyze_shipped_study_ranking() {
    // Running the interval pipeline from the aggregated group matrix ranks I3
    // third and E3 fourth; the printed ranking comes from the printed crisp
    // values, which reproduce-paper reconciles separately.
    let o = rdematel(&["analyze", path_str(&fixture("barrier_study.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(ranks(&stdout(&o)), ["1", "2", "3", "5", "7", "6", "4"]);
}

#[test]
fn reproduce_writes_printed_ranking_table() {
    let d = tempfile::tempdir().unwrap();
    let o = rdematel(&["reproduce-paper", "--out", path_str(d.path())], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 fail"));
    let csv = fs::read_to_string(d.path().join("weights_from_printed_crisp.csv")).unwrap();
    assert_eq!(ranks(&csv), ["1", "2", "4", "5", "7", "6", "3"]);
    let ledger = fs::read_to_string(d.path().join("deviations.csv")).unwrap();
    assert!(ledger
        .lines()
        .any(|l| l.starts_with("A5->3,I1 X,") && l.contains("not-comparable")));
}

#[test]
fn reproduce_with_upper_sum_tau_fails() {
    let o = rdematel(&["reproduce-paper", "--tau", "max-upper-sum"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    let a3_failures = err
        .lines()
        .filter(|l| l.starts_with("FAIL table A3 "))
        .count();
    assert_eq!(a3_failures, 84, "{err}");
    assert!(err.lines().all(|l| l.contains("diff")));
}

#[test]
fn graph_leaves_e1_and_e2_without_outgoing_edges() {
    let o = rdematel(&["graph", path_str(&fixture("barrier_study.json"))], &[]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph influence {"));
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert!(!edges.is_empty());
    assert!(!edges
        .iter()
        .any(|l| l.trim_start().starts_with("\"E1\"") || l.trim_start().starts_with("\"E2\"")));
    assert!(edges.iter().all(|l| l.contains("strength=")));
}

#[test]
fn threshold_precedence_flag_env_bundle() {
    let bundle = fixture("barrier_study.json");
    let count = |o: &Output| stdout(o).lines().filter(|l| l.contains("->")).count();

    let env_only = rdematel(
        &["graph", path_str(&bundle)],
        &[("RDEMATEL_THRESHOLD", "fixed:10")],
    );
    assert_eq!(count(&env_only), 0);

    let flag_wins = rdematel(
        &["graph", path_str(&bundle), "--threshold", "fixed:0"],
        &[("RDEMATEL_THRESHOLD", "fixed:10")],
    );
    assert_eq!(count(&flag_wins), 42);

    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(&bundle).unwrap();
    let with_defaults = text.replacen(
        "\n}\n",
        ",\n  \"analysis\": {\"threshold\": \"fixed:10\"}\n}\n",
        1,
    );
    let path = dir.path().join("b.json");
    fs::write(&path, with_defaults).unwrap();
    assert_eq!(count(&rdematel(&["graph", path_str(&path)], &[])), 0);
    let env_beats_bundle = rdematel(
        &["graph", path_str(&path)],
        &[("RDEMATEL_THRESHOLD", "fixed:0")],
    );
    assert_eq!(count(&env_beats_bundle), 42);
}

#[test]
fn bad_settings_exit_two() {
    let bundle = fixture("barrier_study.json");
    let o = rdematel(
        &["analyze", path_str(&bundle), "--threshold", "fixed:-1"],
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    let o = rdematel(&["analyze", path_str(&bundle), "--tau", "median"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_criterion_bundle_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    fs::write(
        &path,
        r#"{"scale": {"min": 0, "max": 4},
            "criteria": [{"id": "A", "name": "A", "category": "custom"}],
            "respondents": [{"id": "R1", "role": "academic"}, {"id": "R2", "role": "academic"}],
            "matrices": {"R1": [[0]], "R2": [[0]]}}"#,
    )
    .unwrap();
    let o = rdematel(&["analyze", path_str(&path)], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2 criteria"));
}

#[test]
fn synth_is_seeded() {
    let a = rdematel(
        &["synth", "--criteria", "3", "--experts", "4", "--seed", "11"],
        &[],
    );
    let c = rdematel(
        &["synth"],
        &[
            ("RDEMATEL_CRITERIA", "3"),
            ("RDEMATEL_EXPERTS", "4"),
            ("RDEMATEL_SEED", "11"),
        ],
    );
    assert_eq!(a.stdout, c.stdout);
    let bundle = parse_study_bundle(&a.stdout).unwrap();
    assert_eq!(bundle.criteria.len(), 3);
    assert_eq!(bundle.respondents.len(), 4);
    assert!(!bundle.is_aggregate());
    let d = rdematel(
        &["synth", "--criteria", "3", "--experts", "4", "--seed", "12"],
        &[],
    );
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn unanimous_synth_matches_crisp_labels_under_upper_sum_tau() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let o = rdematel(
        &[
            "synth",
            "--criteria",
            "6",
            "--experts",
            "9",
            "--seed",
            "3",
            "--unanimous",
            "--out",
            path_str(&path),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let bundle = parse_study_bundle(&fs::read(&path).unwrap()).unwrap();
    let StudyData::Raw(m) = &bundle.data else {
        panic!()
    };
    let (_, crisp) = crisp_dematel(&[m[0].to_crisp()]).unwrap();

    let out = dir.path().join("report");
    let o = rdematel(
        &[
            "analyze",
            path_str(&path),
            "--tau",
            "max-upper-sum",
            "--out",
            path_str(&out),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("prominence.csv")).unwrap();
    let labels: Vec<String> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    let expected: Vec<String> = crisp
        .relation
        .iter()
        .map(|&r| Group::of(r).to_string())
        .collect();
    assert_eq!(labels, expected);
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(rdematel(&[], &[]).status.code(), Some(2));
}

#[test]
fn validate_csv_errors_have_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r1.csv");
    fs::write(&path, "A,B\nA,1,2\nB,0,0\n").unwrap();
    let o = rdematel(&["validate", path_str(&path)], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column 2"), "{}", stderr(&o));
}
