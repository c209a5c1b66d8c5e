//! Inspects the graph factorization: unary scores, beams and the decoded
//! frames, with predicates identified by the model.

use std::path::Path;

use srllab::corpus::{read_corpus, ConllOptions, Style};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{beam_size, graph_decode, train, Factorization, ModelConfig, SrlModel, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_span.jsonl");
    let corpus = read_corpus(&path, ConllOptions::default())?;
    let cfg = ModelConfig {
        factorization: Factorization::Graph,
        style: Style::Span,
        given_predicates: false,
        beta_p: 0.4,
        beta_a: 0.8,
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
    let mut model = SrlModel::new(cfg.clone(), &corpus)?;
    let tc = TrainConfig {
        epochs: 60,
        batch_size: 8,
        lr: 5e-3,
        target_f1: Some(100.0),
        eval_every: 5,
        ..TrainConfig::default()
    };
    let out = train(&mut model, &corpus, None, &tc)?;
    println!("trained to F1 {:.2} at epoch {}", out.best_f1, out.best_epoch);

    let s = &corpus[0];
    let words: Vec<&str> = s.tokens.iter().map(|t| t.form.as_str()).collect();
    let sc = model.graph_scores(s)?;
    println!(
        "n={} pool={} beams: predicates {} of {}, arguments {} of {}",
        s.len(),
        sc.pool.len(),
        sc.pred_beam.len(),
        beam_size(cfg.beta_p, s.len()),
        sc.arg_beam.len(),
        beam_size(cfg.beta_a, s.len())
    );
    for &p in &sc.pred_beam {
        println!("  predicate {:<8} phi_p {:7.3}", words[p - 1], sc.pred_unary[p - 1]);
    }
    for &i in sc.arg_beam.iter().take(6) {
        let (a, b) = sc.pool[i];
        println!(
            "  argument {:<20} phi_a {:7.3}",
            words[a - 1..b].join(" "),
            sc.arg_unary[i]
        );
    }
    let pred = graph_decode(&model.ctx(), &sc);
    for f in &pred.frames {
        println!("{} {:?}", words[f.predicate - 1], f.span_args());
    }
    Ok(())
}
