//! Trains each factorization on the shipped toy corpus and prints F1.

use std::path::Path;
use std::time::Instant;

use srllab::corpus::{read_corpus, ConllOptions, Style};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{train, Factorization, ModelConfig, SrlModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let args: Vec<String> = std::env::args().collect();
    let fact = match args.get(1).map(String::as_str) {
        Some("tree") => Factorization::Tree,
        Some("graph") => Factorization::Graph,
        _ => Factorization::Sequence,
    };
    let style = if args.get(2).map(String::as_str) == Some("span") {
        Style::Span
    } else {
        Style::Dep
    };
    let file = if style == Style::Span {
        "toy_span.jsonl"
    } else {
        "toy_dep.jsonl"
    };
    let corpus = read_corpus(&data.join(file), ConllOptions::default())?;
    let cfg = ModelConfig {
        factorization: fact,
        style,
        word: WordReprConfig {
            indicator: 8,
            char_out: 0,
            random_word: 24,
            pretrained: 0,
            lemma: 0,
            pos: 8,
            external: 0,
        },
        encoder: EncoderConfig {
            layers: 1,
            hidden: 32,
            dropout_keep: 1.0,
        },
        mlp_hidden: vec![32],
        head_dim: 32,
        span_attn_hidden: 16,
        size_dim: 8,
        unary_hidden: 32,
        include_senses: false,
        ..ModelConfig::default()
    };
    let mut model = SrlModel::new(cfg, &corpus)?;
    let t = Instant::now();
    let out = train(
        &mut model,
        &corpus,
        None,
        &TrainConfig {
            epochs: 300,
            batch_size: 8,
            lr: 5e-3,
            target_f1: Some(100.0),
            eval_every: 5,
            seed: 3,
        },
    )?;
    for m in &out.metrics {
        if let Some(f) = m.dev_f1 {
            println!("epoch {:3} loss {:.4} f1 {:.2}", m.epoch, m.loss, f);
        }
    }
    println!(
        "best {:.2} at epoch {} in {:.1?}",
        out.best_f1,
        out.best_epoch,
        t.elapsed()
    );
    Ok(())
}
