use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use natlog::corpus::parse_labels;
use natlog::prover::Label;

fn natlog(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_natlog"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NATLOG_KB")
        .output()
        .expect("binary runs")
}

const BIRDS: &str = r#"{"id":"birds-hover","premises":["many birds hover high"],"hypothesis":"few birds fly","gold":"contradiction"}"#;

#[test]
fn prove_writes_labels_and_proofs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.jsonl"), format!("{BIRDS}\n")).unwrap();
    let out = natlog(&["prove", "--corpus", "c.jsonl", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let labels = fs::read_to_string(dir.path().join("o/labels.jsonl")).unwrap();
    let lines = parse_labels(&labels).unwrap();
    assert_eq!(lines[0].label, Some(Label::Contradiction));
    assert!(dir.path().join("o/proofs/birds-hover.proof.json").exists());

    let out = natlog(
        &["explain", "--proof", "o/proofs/birds-hover.proof.json", "--format", "rules", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["rules"], serde_json::json!({"upDisCov": 1, "adj_sub_T": 1}));

    let out = natlog(&["evaluate", "--gold", "r.json", "--sys", "r.json", "--format", "rules"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1.000"));

    let out = natlog(&["oracle-check", "--corpus", "c.jsonl", "--labels", "o/labels.jsonl", "--max-size", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("disagreements 0"));
}

#[test]
fn empty_corpus_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.jsonl"), "").unwrap();
    let out = natlog(&["prove", "--corpus", "c.jsonl", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let labels = fs::read_to_string(dir.path().join("o/labels.jsonl")).unwrap();
    assert!(parse_labels(&labels).unwrap().is_empty());
    assert_eq!(fs::read_dir(dir.path().join("o/proofs")).unwrap().count(), 0);
}

#[test]
fn parse_errors_are_isolated() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"id":"bad","premises":["colorless green ideas sleep furiously"],"hypothesis":"some birds fly"}"#;
    fs::write(dir.path().join("c.jsonl"), format!("{bad}\n{BIRDS}\n")).unwrap();
    let out = natlog(&["prove", "--corpus", "c.jsonl", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let lines = parse_labels(&fs::read_to_string(dir.path().join("o/labels.jsonl")).unwrap()).unwrap();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].error.as_deref(), Some("parse"));
    assert_eq!(lines[1].label, Some(Label::Contradiction));
}

#[test]
fn unreadable_corpus_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = natlog(&["prove", "--corpus", "missing.jsonl", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_format_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = natlog(&["explain", "--proof", "p.json", "--format", "dot"], dir.path());
    assert_eq!(out.status.code(), Some(64));
    let out = natlog(&["evaluate", "--gold", "a", "--sys", "b", "--format", "xml"], dir.path());
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn kb_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.jsonl"), format!("{BIRDS}\n")).unwrap();
    fs::write(dir.path().join("empty.tsv"), "# nothing\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_natlog"))
        .args(["prove", "--corpus", "c.jsonl", "--out", "o"])
        .current_dir(dir.path())
        .env("NATLOG_KB", "empty.tsv")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("o/labels.jsonl")).unwrap();
    assert!(text.starts_with(r#"{"config""#) && text.contains("empty.tsv"));
    assert_eq!(parse_labels(&text).unwrap()[0].label, Some(Label::Neutral));
}

#[test]
fn parallel_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/generated.jsonl");
    let corpus = corpus.to_str().unwrap();
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let o = natlog(&["prove", "--corpus", corpus, "--out", out, "--jobs", jobs], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |p: &str| fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/labels.jsonl"), read("b/labels.jsonl"));
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a/proofs")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        let n = n.to_str().unwrap();
        assert_eq!(read(&format!("a/proofs/{n}")), read(&format!("b/proofs/{n}")), "{n}");
    }
}

#[test]
fn shipped_golden_files_are_current() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/golden");
    let out = natlog(&["regress", "--golden-dir", golden.to_str().unwrap()], Path::new(env!("CARGO_MANIFEST_DIR")));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("FAIL"));
}
