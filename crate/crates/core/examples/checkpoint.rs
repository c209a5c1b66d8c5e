//! Trains a tree-factorized model, saves it, reloads it and labels new
//! text with the restored copy.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions, Sentence, Token};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{sidecar_path, train, Factorization, ModelConfig, SrlModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_dep.jsonl");
    let corpus = read_corpus(&path, ConllOptions::default())?;
    let cfg = ModelConfig {
        factorization: Factorization::Tree,
        given_predicates: false,
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
        head_dim: 32,
        ..ModelConfig::default()
    };
    let mut model = SrlModel::new(cfg, &corpus)?;
    let tc = TrainConfig {
        epochs: 100,
        batch_size: 8,
        lr: 5e-3,
        target_f1: Some(100.0),
        eval_every: 5,
        ..TrainConfig::default()
    };
    train(&mut model, &corpus, None, &tc)?;

    let dir = std::env::temp_dir().join("srllab-checkpoint-example");
    std::fs::create_dir_all(&dir)?;
    let ckpt = dir.join("tree.bin");
    model.save(&ckpt)?;
    println!("saved {} and {}", ckpt.display(), sidecar_path(&ckpt).display());
    let restored = SrlModel::load(&ckpt)?;

    let words = [
        ("the", "DT"),
        ("dog", "NN"),
        ("saw", "VBD"),
        ("the", "DT"),
        ("city", "NN"),
    ];
    let s = Sentence::new(words.iter().map(|(w, p)| Token::new(w, w, p)).collect());
    let a = model.predict(&s)?;
    let b = restored.predict(&s)?;
    assert_eq!(a, b);
    for f in &b.frames {
        println!("{} [{}] {:?}", words[f.predicate - 1].0, f.sense, f.dep_args());
    }
    for d in &b.scores {
        println!("  {} {}-{} {} {:.3}", d.predicate, d.start, d.end, d.label, d.score);
    }
    Ok(())
}
