mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{data_path, quick_train, small, toy};
use srllab::cli::RunConfig;
use srllab::corpus::{read_corpus, write_corpus, ConllOptions, Style};
use srllab::eval::EvalReport;
use srllab::models::{Factorization, SyntaxMode};

fn srllab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srllab"))
        .args(args)
        .env("SRLLAB_THREADS", "2")
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(path: &Path) -> EvalReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn train_predict_eval_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let one = &toy(Style::Dep)[..1];
    write_corpus(&dir.path().join("one.jsonl"), one).unwrap();
    let mut training = quick_train(200);
    training.target_f1 = Some(100.0);
    training.eval_every = 1;
    let cfg = RunConfig {
        model: small(Factorization::Sequence, Style::Dep, SyntaxMode::None),
        training,
        train: Some("one.jsonl".into()),
        test: Some("one.jsonl".into()),
        checkpoint: Some("model.bin".into()),
        output: Some("pred.jsonl".into()),
        report: Some("report.json".into()),
        ..RunConfig::default()
    };
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    ok(&srllab(&["train", "--config", s(&cfg_path)]));
    assert!(dir.path().join("model.bin").exists());
    let metrics = std::fs::read_to_string(dir.path().join("model.bin.metrics.csv")).unwrap();
    assert!(metrics.starts_with("epoch,loss,dev_f1\n"));

    ok(&srllab(&["predict", "--config", s(&cfg_path)]));
    ok(&srllab(&["eval", "--config", s(&cfg_path)]));
    assert!(report(&dir.path().join("report.json")).f1 >= 99.0);
}

#[test]
fn eval_gold_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let gold = data_path("toy_dep.jsonl");
    let out = dir.path().join("r.json");
    ok(&srllab(&[
        "eval",
        "--gold",
        s(&gold),
        "--pred",
        s(&gold),
        "--report",
        s(&out),
    ]));
    let r = report(&out);
    assert_eq!((r.precision, r.recall, r.f1), (100.0, 100.0, 100.0));

    ok(&srllab(&[
        "eval",
        "--gold",
        s(&gold),
        "--pred",
        s(&gold),
        "--report",
        s(&out),
        "--syntax-score",
        "80",
    ]));
    assert_eq!(report(&out).ratio, Some(125.0));
}

#[test]
fn stats_coverage_grows_with_k() {
    let out = srllab(&[
        "stats",
        "--corpus",
        s(&data_path("toy_dep.jsonl")),
        "--k-min",
        "1",
        "--k-max",
        "3",
    ]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,coverage,reduction"));
    let cov: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(cov.len(), 3);
    assert!(cov.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn rules_keep_top_k() {
    let out = srllab(&["rules", "--corpus", s(&data_path("toy_dep.jsonl")), "--top-k", "1"]);
    ok(&out);
    let rows: Vec<((usize, usize), usize)> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].1 > 0);
}

#[test]
fn corrupt_at_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let src = data_path("toy_dep.jsonl");
    let out = dir.path().join("c.jsonl");
    ok(&srllab(&[
        "corrupt",
        "--corpus",
        s(&src),
        "--p",
        "0",
        "--seed",
        "4",
        "--output",
        s(&out),
    ]));
    let a = read_corpus(&src, ConllOptions::default()).unwrap();
    let b = read_corpus(&out, ConllOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"train": "x.jsonl", "learning_rate": 0.1}"#).unwrap();
    let out = srllab(&["train", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("learning_rate"), "{}", err);
    assert!(err.contains("bad.json"), "{}", err);

    let out = srllab(&["corrupt", "--corpus", "x", "--p", "1.5", "--output", "y"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_data_exits_3_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    let good = std::fs::read_to_string(data_path("toy_dep.jsonl")).unwrap();
    let first = good.lines().next().unwrap();
    std::fs::write(&bad, format!("{}\n{{not json\n", first)).unwrap();
    let out = srllab(&["rules", "--corpus", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.jsonl") && err.contains('2'), "{}", err);
}
