use serde::{Deserialize, Serialize};

use crate::corpus::{parse_embeddings, Sentence, Vocabularies};
use crate::numcore::{Axis, Graph, Tensor, Var};

use super::char_encoder::CharEncoder;
use super::linear::Embedding;
use super::{LayerError, ParamBuilder};

/// Component dimensions of the word representation; 0 disables a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordReprConfig {
    pub indicator: usize,
    pub char_out: usize,
    pub random_word: usize,
    pub pretrained: usize,
    pub lemma: usize,
    pub pos: usize,
    pub external: usize,
}

impl Default for WordReprConfig {
    fn default() -> Self {
        WordReprConfig {
            indicator: 16,
            char_out: 100,
            random_word: 100,
            pretrained: 100,
            lemma: 100,
            pos: 100,
            external: 0,
        }
    }
}

impl WordReprConfig {
    pub fn total(&self) -> usize {
        self.indicator + self.char_out + self.random_word + self.pretrained + self.lemma + self.pos + self.external
    }

    /// Everything except the indicator.
    pub fn lexical(&self) -> usize {
        self.total() - self.indicator
    }
}

/// Vocabulary ids of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenIds {
    pub forms: Vec<usize>,
    pub lemmas: Vec<usize>,
    pub pos: Vec<usize>,
    pub chars: Vec<Vec<usize>>,
    pub ext: Option<Tensor>,
}

impl TokenIds {
    pub fn new(s: &Sentence, v: &Vocabularies) -> Self {
        let ext = s.ext_vectors.as_ref().and_then(|rows| Tensor::from_rows(rows).ok());
        TokenIds {
            forms: s.tokens.iter().map(|t| v.form.id(&t.form)).collect(),
            lemmas: s.tokens.iter().map(|t| v.lemma.id(&t.lemma)).collect(),
            pos: s.tokens.iter().map(|t| v.pos.id(&t.pos)).collect(),
            chars: s
                .tokens
                .iter()
                .map(|t| t.chars().iter().map(|c| v.character.id(&c.to_string())).collect())
                .collect(),
            ext,
        }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// `[indicator, char, random word, pretrained word, lemma, pos, external]`.
#[derive(Debug, Clone)]
pub struct WordRepr {
    pub cfg: WordReprConfig,
    indicator: Option<Embedding>,
    chars: Option<CharEncoder>,
    random: Option<Embedding>,
    pretrained: Option<Embedding>,
    lemma: Option<Embedding>,
    pos: Option<Embedding>,
}

impl WordRepr {
    /// `pretrained` is a `|form vocab| x cfg.pretrained` table; without one
    /// the rows are small seeded noise. The pretrained table is frozen.
    pub fn new(
        p: &mut ParamBuilder,
        cfg: WordReprConfig,
        vocabs: &Vocabularies,
        pretrained: Option<Tensor>,
        seed: u64,
    ) -> Result<Self, LayerError> {
        let emb =
            |p: &mut ParamBuilder, name: &str, rows: usize, dim: usize| -> Result<Option<Embedding>, LayerError> {
                Ok(if dim == 0 {
                    None
                } else {
                    Some(Embedding::new(p, name, rows, dim)?)
                })
            };
        let indicator = emb(p, "indicator", 2, cfg.indicator)?;
        let chars = if cfg.char_out == 0 {
            None
        } else {
            Some(CharEncoder::new(
                &mut p.sub("char"),
                vocabs.character.len(),
                cfg.char_out,
            )?)
        };
        let random = emb(p, "word", vocabs.form.len(), cfg.random_word)?;
        let pretrained = if cfg.pretrained == 0 {
            None
        } else {
            let table = match pretrained {
                Some(t) => t,
                None => parse_embeddings("", &vocabs.form, cfg.pretrained, seed).expect("empty text parses"),
            };
            let id = p.tensor("pretrained", table)?;
            p.store().freeze(id);
            Some(Embedding {
                table: id,
                dim: cfg.pretrained,
            })
        };
        Ok(WordRepr {
            cfg,
            indicator,
            chars,
            random,
            pretrained,
            lemma: emb(p, "lemma", vocabs.lemma.len(), cfg.lemma)?,
            pos: emb(p, "pos", vocabs.pos.len(), cfg.pos)?,
        })
    }

    pub fn out_dim(&self) -> usize {
        self.cfg.total()
    }

    /// Predicate-independent part, n x cfg.lexical(); `None` when every
    /// lexical component is disabled.
    pub fn lexical(&self, g: &mut Graph, ids: &TokenIds) -> Result<Option<Var>, LayerError> {
        let mut parts = Vec::new();
        if let Some(ce) = &self.chars {
            let rows = ids
                .chars
                .iter()
                .map(|c| ce.encode(g, c))
                .collect::<Result<Vec<_>, _>>()?;
            parts.push(g.concat(&rows, Axis::Rows)?);
        }
        for (e, id) in [
            (&self.random, &ids.forms),
            (&self.pretrained, &ids.forms),
            (&self.lemma, &ids.lemmas),
            (&self.pos, &ids.pos),
        ] {
            if let Some(e) = e {
                parts.push(e.lookup(g, id)?);
            }
        }
        if self.cfg.external > 0 {
            let ext = ids.ext.as_ref().ok_or(LayerError::MissingExternal(self.cfg.external))?;
            if ext.cols() != self.cfg.external || ext.rows() != ids.len() {
                return Err(LayerError::ExternalDim {
                    got: ext.cols(),
                    want: self.cfg.external,
                });
            }
            parts.push(g.constant(ext.clone()));
        }
        if parts.is_empty() {
            return Ok(None);
        }
        Ok(Some(g.concat(&parts, Axis::Cols)?))
    }

    /// Prepends the indicator embedding of `flags` (0/1 per token).
    pub fn with_indicator(&self, g: &mut Graph, lexical: Option<Var>, flags: &[usize]) -> Result<Var, LayerError> {
        let mut parts = Vec::new();
        if let Some(ind) = &self.indicator {
            parts.push(ind.lookup(g, flags)?);
        }
        parts.extend(lexical);
        Ok(g.concat(&parts, Axis::Cols)?)
    }

    pub fn forward(&self, g: &mut Graph, ids: &TokenIds, flags: &[usize]) -> Result<Var, LayerError> {
        let lex = self.lexical(g, ids)?;
        self.with_indicator(g, lex, flags)
    }
}
