use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::vocab::{Vocab, PAD, UNK};
use super::CorpusError;
use crate::numcore::Tensor;

const MISS_RANGE: f64 = 0.01;

pub fn load_embeddings(path: &Path, vocab: &Vocab, dim: usize, seed: u64) -> Result<Tensor, CorpusError> {
    let text = std::fs::read_to_string(path)?;
    parse_embeddings(&text, vocab, dim, seed)
}

/// Builds a `|vocab| x dim` table from `word v1 .. v_dim` lines. Words
/// without an exact entry fall back to a lowercase match; the rest draw
/// from `uniform(-0.01, 0.01)`. PAD and UNK rows are zero.
pub fn parse_embeddings(text: &str, vocab: &Vocab, dim: usize, seed: u64) -> Result<Tensor, CorpusError> {
    let mut exact: HashMap<&str, Vec<f64>> = HashMap::new();
    let mut lower: HashMap<String, Vec<f64>> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else { continue };
        let vec = fields
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CorpusError::Format {
                line: i + 1,
                msg: format!("bad value for {:?}: {}", word, e),
            })?;
        if vec.len() != dim {
            return Err(CorpusError::Format {
                line: i + 1,
                msg: format!("{:?} has {} values, expected {}", word, vec.len(), dim),
            });
        }
        lower.entry(word.to_lowercase()).or_insert_with(|| vec.clone());
        exact.entry(word).or_insert(vec);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Tensor::uniform(&[vocab.len(), dim], -MISS_RANGE, MISS_RANGE, &mut rng);
    for id in 0..vocab.len() {
        let row = &mut table.data_mut()[id * dim..(id + 1) * dim];
        if id == PAD || id == UNK {
            row.fill(0.0);
            continue;
        }
        let w = vocab.symbol(id);
        if let Some(v) = exact.get(w).or_else(|| lower.get(&w.to_lowercase())) {
            row.copy_from_slice(v);
        }
    }
    Ok(table)
}
