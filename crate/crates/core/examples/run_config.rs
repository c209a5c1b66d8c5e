//! Prints a complete run config for `srllab train --config`, with every
//! model and training field at its default.

use srllab::cli::RunConfig;

fn main() {
    let cfg = RunConfig {
        train: Some("train.jsonl".into()),
        dev: Some("dev.jsonl".into()),
        test: Some("test.jsonl".into()),
        checkpoint: Some("model.bin".into()),
        output: Some("pred.jsonl".into()),
        report: Some("report.json".into()),
        ..RunConfig::default()
    };
    println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
}
