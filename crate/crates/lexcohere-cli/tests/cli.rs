//! Drives the compiled binary over the files in demo/: both build steps,
//! then each query subcommand, checking exit codes and the documented
//! output shapes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lexcohere"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "lexcohere {args:?} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Runs both build steps into `root` and returns the spaces directory.
fn build_demo(root: &Path) -> PathBuf {
    let demo = demo_dir();
    let pdocs = root.join("pdocs");
    let spaces = root.join("spaces");
    let out = run(&[
        "build-pdocs",
        "--term-bank",
        demo.join("term_bank.txt").to_str().unwrap(),
        "--corpus",
        demo.join("corpus.txt").to_str().unwrap(),
        "--out",
        pdocs.to_str().unwrap(),
        "--config",
        demo.join("config.toml").to_str().unwrap(),
    ]);
    assert!(stdout(&out).contains("kept 5 of 5 terms"));
    assert!(pdocs.join("manifest.tsv").is_file());

    run(&[
        "build-spaces",
        "--pdocs",
        pdocs.to_str().unwrap(),
        "--out",
        spaces.to_str().unwrap(),
        "--config",
        demo.join("config.toml").to_str().unwrap(),
    ]);
    assert!(spaces.join("manifest.json").is_file());
    spaces
}

#[test]
fn answer_prints_winner_and_subscores() {
    let tmp = tempfile::tempdir().unwrap();
    let spaces = build_demo(tmp.path());
    let out = run(&[
        "answer",
        "--spaces",
        spaces.to_str().unwrap(),
        "--question",
        "the magma pushed through the crust",
        "--choice",
        "lava at the vent",
        "--choice",
        "snow on the moraine",
    ]);
    let text = stdout(&out);
    assert!(
        text.contains("* choice 0"),
        "winner marker missing:\n{text}"
    );
    assert!(text.contains("1.1="), "subscore row missing:\n{text}");

    let json = run(&[
        "answer",
        "--spaces",
        spaces.to_str().unwrap(),
        "--question",
        "the magma pushed through the crust",
        "--choice",
        "lava at the vent",
        "--choice",
        "snow on the moraine",
        "--json",
    ]);
    let answer: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(answer["argmax"], serde_json::json!([0]));
    assert_eq!(answer["breakdowns"].as_array().unwrap().len(), 2);
}

#[test]
fn answer_rejects_unknown_subscore_label() {
    let tmp = tempfile::tempdir().unwrap();
    let spaces = build_demo(tmp.path());
    let out = bin()
        .args([
            "answer",
            "--spaces",
            spaces.to_str().unwrap(),
            "--question",
            "q",
            "--choice",
            "a",
            "--choice",
            "b",
            "--disable",
            "9.9",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("9.9"), "label missing from error: {stderr}");
}

#[test]
fn answer_requires_two_choices() {
    let tmp = tempfile::tempdir().unwrap();
    let spaces = build_demo(tmp.path());
    let out = bin()
        .args([
            "answer",
            "--spaces",
            spaces.to_str().unwrap(),
            "--question",
            "q",
            "--choice",
            "only one",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn evaluate_reports_accuracy_breakdowns_and_comparison() {
    let tmp = tempfile::tempdir().unwrap();
    let spaces = build_demo(tmp.path());
    let questions = demo_dir().join("questions.jsonl");
    let report_path = tmp.path().join("report.json");
    let breakdowns_path = tmp.path().join("breakdowns.jsonl");

    let json = run(&[
        "evaluate",
        "--spaces",
        spaces.to_str().unwrap(),
        "--questions",
        questions.to_str().unwrap(),
        "--breakdowns",
        breakdowns_path.to_str().unwrap(),
        "--json",
    ]);
    std::fs::write(&report_path, stdout(&json)).unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(report["accuracy"], serde_json::json!(1.0));
    assert_eq!(report["question_count"], serde_json::json!(10));
    assert_eq!(report["marks"].as_object().unwrap().len(), 10);

    let lines = std::fs::read_to_string(&breakdowns_path).unwrap();
    assert_eq!(lines.lines().count(), 10);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["answer"]["breakdowns"].is_array());

    // self-comparison: identical marks, p must come out at 1
    let compared = run(&[
        "evaluate",
        "--spaces",
        spaces.to_str().unwrap(),
        "--questions",
        questions.to_str().unwrap(),
        "--compare",
        report_path.to_str().unwrap(),
    ]);
    let text = stdout(&compared);
    assert!(
        text.contains("p = 1.000000"),
        "self comparison p line missing:\n{text}"
    );
}

#[test]
fn ablate_and_sweep_list_every_row() {
    let tmp = tempfile::tempdir().unwrap();
    let spaces = build_demo(tmp.path());
    let questions = demo_dir().join("questions.jsonl");

    let ablate = run(&[
        "ablate",
        "--spaces",
        spaces.to_str().unwrap(),
        "--questions",
        questions.to_str().unwrap(),
        "--json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&ablate)).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 8);

    let sweep = run(&[
        "sweep",
        "--spaces",
        spaces.to_str().unwrap(),
        "--questions",
        questions.to_str().unwrap(),
        "--json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&sweep)).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["beam"]["step1_keep"], serde_json::json!(5));
    assert_eq!(rows[3]["beam"]["step1_keep"], serde_json::json!(40));
}
