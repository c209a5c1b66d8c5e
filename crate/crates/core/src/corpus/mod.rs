//! Sentences, trees and frames, plus the on-disk formats they travel in.

mod bio;
mod conll09;
mod embeddings;
mod jsonl;
mod sentence;
mod tree;
mod vocab;

use std::path::Path;

use thiserror::Error;

pub use bio::{bio_to_spans, spans_to_bio, OUTSIDE};
pub use conll09::{parse_conll09, parse_conll09_with, write_conll09, ConllOptions};
pub use embeddings::{load_embeddings, parse_embeddings};
pub use jsonl::{read_jsonl, write_jsonl};
pub use sentence::{Arguments, ConllExtras, DepArg, Frame, Sentence, SpanArg, Style, Token};
pub use tree::{validate_heads, Bracket, ConstTree, DepTree, TreeError};
pub use vocab::{build_vocab, Vocab, Vocabularies, PAD, UNK};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Tree { line: usize, source: TreeError },
    #[error("{0}")]
    Invalid(String),
    #[error("{0:?}-style frames are not supported here")]
    UnsupportedStyle(Style),
    #[error("spans ({0}, {1}) and ({2}, {3}) overlap")]
    OverlappingSpans(usize, usize, usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// On-disk corpus encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Conll09,
    Jsonl,
}

impl CorpusFormat {
    /// `.jsonl`/`.json` files are JSON lines, everything else CoNLL-2009.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Conll09,
        }
    }
}

pub fn read_corpus(path: &Path, opts: ConllOptions) -> Result<Vec<Sentence>, CorpusError> {
    let text = std::fs::read_to_string(path)?;
    match CorpusFormat::from_path(path) {
        CorpusFormat::Jsonl => read_jsonl(&text),
        CorpusFormat::Conll09 => parse_conll09_with(&text, opts),
    }
}

pub fn write_corpus(path: &Path, sentences: &[Sentence]) -> Result<(), CorpusError> {
    let text = match CorpusFormat::from_path(path) {
        CorpusFormat::Jsonl => write_jsonl(sentences)?,
        CorpusFormat::Conll09 => write_conll09(sentences)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}
