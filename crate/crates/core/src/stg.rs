//! Seeded corruption of dependency trees at a controlled error rate.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{validate_heads, DepTree, Sentence};

#[derive(Debug, Error, PartialEq)]
pub enum StgError {
    #[error("error probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("trees have {0} and {1} tokens")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionConfig {
    pub p: f64,
    pub seed: u64,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_retries() -> usize {
    100
}

impl CorruptionConfig {
    pub fn new(p: f64, seed: u64) -> Result<Self, StgError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(StgError::Probability(p));
        }
        Ok(CorruptionConfig {
            p,
            seed,
            max_retries: default_retries(),
        })
    }
}

pub fn corrupt_tree(gold: &DepTree, cfg: &CorruptionConfig) -> DepTree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    corrupt_tree_with(gold, cfg.p, cfg.max_retries, &mut rng)
}

/// Visits nodes left to right; with probability `p` a node's head is
/// redrawn uniformly from `0..=n` until the tree stays valid, keeping the
/// current head after `max_retries` failed draws.
pub fn corrupt_tree_with<R: Rng>(gold: &DepTree, p: f64, max_retries: usize, rng: &mut R) -> DepTree {
    let n = gold.len();
    let single_root = gold.is_single_rooted();
    let mut heads = gold.heads().to_vec();
    for i in 0..n {
        if rng.gen::<f64>() >= p {
            continue;
        }
        let old = heads[i];
        let mut accepted = false;
        for _ in 0..max_retries {
            heads[i] = rng.gen_range(0..=n);
            if is_valid(&heads, single_root) {
                accepted = true;
                break;
            }
        }
        if !accepted {
            heads[i] = old;
        }
    }
    gold.with_heads(heads).expect("only valid trees are accepted")
}

fn is_valid(heads: &[usize], single_root: bool) -> bool {
    validate_heads(heads).is_ok() && (!single_root || heads.iter().filter(|&&h| h == 0).count() == 1)
}

/// Corrupts every sentence's tree with an independent stream per sentence.
/// The corrupted tree replaces `alt_dep`; `dep` keeps the gold tree.
pub fn corrupt_corpus(sentences: &[Sentence], cfg: &CorruptionConfig) -> Vec<Sentence> {
    sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut s = s.clone();
            if let Some(gold) = &s.dep {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64);
                s.alt_dep = Some(corrupt_tree_with(gold, cfg.p, cfg.max_retries, &mut rng));
            }
            s
        })
        .collect()
}

/// Fraction of tokens whose head differs.
pub fn corruption_rate(gold: &DepTree, corrupted: &DepTree) -> Result<f64, StgError> {
    if gold.len() != corrupted.len() {
        return Err(StgError::LengthMismatch(gold.len(), corrupted.len()));
    }
    let changed = gold
        .heads()
        .iter()
        .zip(corrupted.heads())
        .filter(|(a, b)| a != b)
        .count();
    Ok(changed as f64 / gold.len() as f64)
}
