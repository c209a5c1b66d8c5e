#![allow(dead_code)]

use std::path::PathBuf;

use srllab::corpus::{read_corpus, ConllOptions, Sentence, Style};
use srllab::layers::{EncoderConfig, WordReprConfig};
use srllab::models::{Factorization, ModelConfig, SyntaxEncoderConfig, SyntaxMode, SyntaxSource, TrainConfig};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn toy(style: Style) -> Vec<Sentence> {
    let name = match style {
        Style::Dep => "toy_dep.jsonl",
        Style::Span => "toy_span.jsonl",
    };
    read_corpus(&data_path(name), ConllOptions::default()).unwrap()
}

/// Small dimensions that still fit the toy corpus.
pub fn small(factorization: Factorization, style: Style, syntax: SyntaxMode) -> ModelConfig {
    ModelConfig {
        factorization,
        style,
        syntax,
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
        syntax_encoder: SyntaxEncoderConfig {
            layers: 1,
            dim: 16,
            source: SyntaxSource::Dep,
            spos_dim: 4,
        },
        mlp_hidden: vec![32],
        head_dim: 32,
        span_attn_hidden: 16,
        size_dim: 8,
        unary_hidden: 32,
        include_senses: false,
        seed: 5,
        ..ModelConfig::default()
    }
}

pub fn quick_train(epochs: usize) -> TrainConfig {
    TrainConfig {
        epochs,
        batch_size: 8,
        lr: 5e-3,
        target_f1: None,
        eval_every: epochs.max(1),
        seed: 3,
    }
}

/// Single-rooted tree from an attachment order and per-node choices: the
/// first node in `order` hangs off ROOT, every later one off an earlier node.
pub fn tree_from(order: &[usize], picks: &[usize]) -> srllab::corpus::DepTree {
    let n = order.len();
    let mut heads = vec![0; n];
    for j in 1..n {
        heads[order[j]] = order[picks[j] % j] + 1;
    }
    srllab::corpus::DepTree::unlabeled(heads, "dep").unwrap()
}

pub fn arb_tree(max_n: usize) -> impl proptest::strategy::Strategy<Value = srllab::corpus::DepTree> {
    use proptest::prelude::*;
    (1..=max_n).prop_flat_map(|n| {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(any::<usize>(), n),
        )
            .prop_map(|(order, picks)| tree_from(&order, &picks))
    })
}

/// Hard-prune candidates by definition: every token strictly below some
/// node on the predicate's path to ROOT, at distance at most `k`.
pub fn brute_hard_prune(
    tree: &srllab::corpus::DepTree,
    p: usize,
    k: usize,
    root_too: bool,
) -> std::collections::BTreeSet<usize> {
    let mut path = tree.path_to_root(p);
    if !root_too {
        path.pop();
    }
    (1..=tree.len())
        .filter(|&a| {
            let up = tree.path_to_root(a);
            path.iter()
                .any(|&c| up.iter().position(|&x| x == c).is_some_and(|d| d >= 1 && d <= k))
        })
        .collect()
}
