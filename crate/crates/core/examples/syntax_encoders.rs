//! Trains the sequence model briefly with each way of feeding syntax in
//! and prints the training-set F1.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{
    train, EncoderKind, ModelConfig, SrlModel, SyntaxEncoderConfig, SyntaxMode, SyntaxSource, TrainConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_dep.jsonl");
    let corpus = read_corpus(&path, ConllOptions::default())?;
    let base = ModelConfig {
        word: WordReprConfig {
            indicator: 8,
            char_out: 0,
            random_word: 16,
            pretrained: 0,
            lemma: 0,
            pos: 8,
            external: 0,
        },
        encoder: EncoderConfig {
            layers: 1,
            hidden: 24,
            dropout_keep: 1.0,
        },
        syntax_encoder: SyntaxEncoderConfig {
            layers: 1,
            dim: 16,
            source: SyntaxSource::Dep,
            spos_dim: 4,
        },
        mlp_hidden: vec![24],
        include_senses: false,
        ..ModelConfig::default()
    };
    let mut modes = vec![
        ("none", SyntaxMode::None, SyntaxSource::Dep),
        ("hard k=1", SyntaxMode::HardPrune { k: 1 }, SyntaxSource::Dep),
        ("soft top3", SyntaxMode::SoftPrune { top_k: 3 }, SyntaxSource::Dep),
    ];
    for (name, kind) in [
        ("gcn", EncoderKind::Gcn),
        ("sa-lstm", EncoderKind::SaLstm),
        ("tree-lstm", EncoderKind::TreeLstm),
    ] {
        modes.push((name, SyntaxMode::Encoder { kind }, SyntaxSource::Dep));
        modes.push((name, SyntaxMode::Encoder { kind }, SyntaxSource::Const));
    }
    let tc = TrainConfig {
        epochs: 10,
        batch_size: 8,
        lr: 5e-3,
        eval_every: 10,
        ..TrainConfig::default()
    };
    for (name, syntax, source) in modes {
        let mut cfg = base.clone();
        cfg.syntax = syntax;
        cfg.syntax_encoder.source = source;
        let mut model = SrlModel::new(cfg, &corpus)?;
        let out = train(&mut model, &corpus, None, &tc)?;
        println!(
            "{:<10} {:<6?} F1 {:6.2} tensors {}",
            name,
            source,
            out.best_f1,
            model.store.len()
        );
    }
    Ok(())
}
