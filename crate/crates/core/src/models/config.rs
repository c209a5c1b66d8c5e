use serde::{Deserialize, Serialize};

use crate::corpus::Style;
use crate::layers::{EncoderConfig, WordReprConfig};
use crate::pruning::{DEFAULT_K, DEFAULT_TOP_K};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factorization {
    Sequence,
    Tree,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Gcn,
    SaLstm,
    TreeLstm,
}

/// Where syntax enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntaxMode {
    None,
    HardPrune {
        #[serde(default = "default_k")]
        k: usize,
    },
    SoftPrune {
        #[serde(default = "default_top_k")]
        top_k: usize,
    },
    ConstPrune,
    Encoder {
        kind: EncoderKind,
    },
}

fn default_k() -> usize {
    DEFAULT_K
}

fn default_top_k() -> usize {
    DEFAULT_TOP_K
}

/// Tree a syntax encoder reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntaxSource {
    #[default]
    Dep,
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntaxEncoderConfig {
    pub layers: usize,
    /// GCN output size, or hidden size per direction / per node for the LSTMs.
    pub dim: usize,
    pub source: SyntaxSource,
    /// Boundary indicator size for constituent features.
    pub spos_dim: usize,
}

impl Default for SyntaxEncoderConfig {
    fn default() -> Self {
        SyntaxEncoderConfig {
            layers: 1,
            dim: 300,
            source: SyntaxSource::Dep,
            spos_dim: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub factorization: Factorization,
    pub style: Style,
    pub syntax: SyntaxMode,
    pub word: WordReprConfig,
    pub encoder: EncoderConfig,
    pub syntax_encoder: SyntaxEncoderConfig,
    /// Hidden sizes of the sequence tagger MLP.
    pub mlp_hidden: Vec<usize>,
    /// Size of the predicate/argument projections feeding the biaffine scorer.
    pub head_dim: usize,
    pub beta_p: f64,
    pub beta_a: f64,
    /// Longest candidate span; `None` means 30 for span style and 1 for dep.
    pub max_span_len: Option<usize>,
    pub span_attn_hidden: usize,
    pub size_dim: usize,
    pub unary_hidden: usize,
    pub aux_weight: f64,
    /// Predicates come from the input; otherwise they are identified.
    pub given_predicates: bool,
    pub include_root_children: bool,
    pub include_senses: bool,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            factorization: Factorization::Sequence,
            style: Style::Dep,
            syntax: SyntaxMode::None,
            word: WordReprConfig::default(),
            encoder: EncoderConfig::default(),
            syntax_encoder: SyntaxEncoderConfig::default(),
            mlp_hidden: vec![300, 300],
            head_dim: 300,
            beta_p: 0.4,
            beta_a: 0.8,
            max_span_len: None,
            span_attn_hidden: 100,
            size_dim: 20,
            unary_hidden: 150,
            aux_weight: 0.1,
            given_predicates: true,
            include_root_children: false,
            include_senses: true,
            min_count: 1,
            seed: 1,
        }
    }
}

impl ModelConfig {
    pub fn span_len(&self) -> usize {
        match (self.style, self.max_span_len) {
            (Style::Dep, _) => 1,
            (Style::Span, Some(l)) => l.max(1),
            (Style::Span, None) => 30,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::Config(m.to_string()));
        match self.syntax {
            SyntaxMode::ConstPrune if self.factorization != Factorization::Graph || self.style != Style::Span => {
                return bad("const_prune needs the graph factorization and span style");
            }
            SyntaxMode::HardPrune { .. } | SyntaxMode::SoftPrune { .. } if self.style != Style::Dep => {
                return bad("hard_prune and soft_prune need dep style");
            }
            SyntaxMode::HardPrune { k: 0 } => return bad("hard_prune k must be at least 1"),
            SyntaxMode::SoftPrune { top_k: 0 } => return bad("soft_prune top_k must be at least 1"),
            _ => {}
        }
        if self.factorization == Factorization::Tree && self.style != Style::Dep {
            return bad("the tree factorization needs dep style");
        }
        if self.encoder.layers == 0 || self.encoder.hidden == 0 {
            return bad("encoder needs at least one layer and a positive hidden size");
        }
        if !(0.0..=1.0).contains(&self.encoder.dropout_keep) || self.encoder.dropout_keep == 0.0 {
            return bad("dropout_keep must be in (0, 1]");
        }
        if self.word.total() == 0 {
            return bad("word representation has no components");
        }
        if !(self.beta_p > 0.0 && self.beta_p <= 1.0 && self.beta_a > 0.0 && self.beta_a <= 1.0) {
            return bad("beta_p and beta_a must be in (0, 1]");
        }
        if self.factorization == Factorization::Sequence && self.mlp_hidden.is_empty() {
            return bad("mlp_hidden must list at least one layer");
        }
        if matches!(self.syntax, SyntaxMode::Encoder { .. })
            && (self.syntax_encoder.layers == 0 || self.syntax_encoder.dim == 0)
        {
            return bad("syntax encoder needs at least one layer and a positive dim");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_mode_json() {
        let m: SyntaxMode = serde_json::from_str(r#"{"mode":"hard_prune","k":3}"#).unwrap();
        assert_eq!(m, SyntaxMode::HardPrune { k: 3 });
        let m: SyntaxMode = serde_json::from_str(r#"{"mode":"encoder","kind":"salstm"}"#).unwrap();
        assert_eq!(
            m,
            SyntaxMode::Encoder {
                kind: EncoderKind::SaLstm
            }
        );
    }

    #[test]
    fn invariants() {
        let mut c = ModelConfig {
            syntax: SyntaxMode::ConstPrune,
            ..ModelConfig::default()
        };
        assert!(c.validate().is_err());
        c.factorization = Factorization::Graph;
        c.style = Style::Span;
        assert!(c.validate().is_ok());
        c.syntax = SyntaxMode::SoftPrune { top_k: 5 };
        assert!(c.validate().is_err());
        assert_eq!(ModelConfig::default().span_len(), 1);
        assert_eq!(c.span_len(), 30);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = serde_json::from_str::<ModelConfig>(r#"{"factorisation":"tree"}"#).unwrap_err();
        assert!(err.to_string().contains("factorisation"));
    }
}
