//! The sequence, tree and graph factorizations, their training loop and
//! checkpoints.

mod checkpoint;
mod config;
mod encoder;
mod graph;
mod labels;
mod sequence;
mod tagger;
mod train;
mod tree;

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{build_vocab, load_embeddings, CorpusError, Frame, Sentence, Style, Vocabularies};
use crate::eval::EvalError;
use crate::layers::{LayerError, ParamBuilder, TokenIds};
use crate::numcore::{Graph, NumError, ParamStore, Tensor, Var};
use crate::pruning::{
    build_syntactic_rule, hard_prune_with, soft_prune_mask, DistanceTupleTable, HardPruneOptions, PruneError,
};

pub use checkpoint::sidecar_path;
pub use config::{EncoderKind, Factorization, ModelConfig, SyntaxEncoderConfig, SyntaxMode, SyntaxSource};
pub use encoder::{SentenceEncoder, SyntaxEncoder, SyntaxInput};
pub use graph::{beam_size, decode as graph_decode, top_k_by_score, GraphNet, GraphScores};
pub use labels::{sense_label, sense_string, LabelSet, Labels, EMPTY_SENSE, NULL, NULL_LABEL};
pub use sequence::SequenceNet;
pub use tagger::PredicateTagger;
pub use train::{evaluate_f1, train, EpochMetrics, TrainConfig, TrainOutcome};
pub use tree::TreeNet;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    Config(String),
    #[error(transparent)]
    Layer(LayerError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Prune(#[from] PruneError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("sentence lacks a {0} tree")]
    MissingTree(&'static str),
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("corpus has {got:?} frames, model expects {want:?}")]
    StyleMismatch { got: Style, want: Style },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Score of one kept decision. Sense decisions use `start = end = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionScore {
    pub predicate: usize,
    pub start: usize,
    pub end: usize,
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Prediction {
    pub frames: Vec<Frame>,
    pub scores: Vec<DecisionScore>,
}

impl Prediction {
    /// `sentence` with its frames replaced by the predicted ones.
    pub fn apply(&self, sentence: &Sentence) -> Sentence {
        let mut s = sentence.clone();
        s.frames = self.frames.clone();
        s
    }
}

/// Per-sentence inputs shared by every factorization.
pub struct Prepared<'a> {
    pub sentence: &'a Sentence,
    pub ids: TokenIds,
    pub syntax: Option<SyntaxInput>,
    /// Given predicate positions, ascending (empty when predicates are identified).
    pub predicates: Vec<usize>,
}

/// Read-only model context handed to the networks.
pub struct Ctx<'a> {
    pub cfg: &'a ModelConfig,
    pub vocabs: &'a Vocabularies,
    pub labels: &'a Labels,
    pub rule: Option<&'a DistanceTupleTable>,
}

impl Ctx<'_> {
    /// Per-token admissibility for predicate `p` under hard or soft pruning;
    /// `None` when the syntax mode prunes nothing.
    pub fn prune_mask(&self, s: &Sentence, p: usize) -> Result<Option<Vec<bool>>, ModelError> {
        match self.cfg.syntax {
            SyntaxMode::HardPrune { k } => {
                let tree = s.dep.as_ref().ok_or(ModelError::MissingTree("dependency"))?;
                let opts = HardPruneOptions {
                    include_root_children: self.cfg.include_root_children,
                };
                let hp = hard_prune_with(tree, p, k, opts)?;
                let mut mask = vec![false; s.len()];
                for c in hp.candidates {
                    mask[c - 1] = true;
                }
                mask[p - 1] = true;
                Ok(Some(mask))
            }
            SyntaxMode::SoftPrune { .. } => {
                let tree = s.dep.as_ref().ok_or(ModelError::MissingTree("dependency"))?;
                let rule = self
                    .rule
                    .ok_or_else(|| ModelError::Config("soft_prune needs a rule table".into()))?;
                Ok(Some(soft_prune_mask(tree, p, rule)?))
            }
            _ => Ok(None),
        }
    }
}

/// Index of the largest value in `row[range]`, lowest index on ties.
pub fn argmax_in(row: &[f64], range: std::ops::Range<usize>) -> usize {
    let mut best = range.start;
    for i in range {
        if row[i] > row[best] {
            best = i;
        }
    }
    best
}

/// Accumulates cross-entropy terms; the loss is the mean over all decisions.
#[derive(Default)]
pub(crate) struct Decisions {
    terms: Vec<(Var, usize)>,
    extra: Vec<Var>,
}

impl Decisions {
    pub fn push(&mut self, g: &mut Graph, logits: Var, targets: &[usize]) -> Result<(), ModelError> {
        if targets.is_empty() {
            return Ok(());
        }
        let ce = g.cross_entropy(logits, targets)?;
        self.terms.push((ce, targets.len()));
        Ok(())
    }

    /// Adds an already-weighted term outside the decision mean.
    pub fn push_extra(&mut self, v: Var) {
        self.extra.push(v);
    }

    pub fn finish(self, g: &mut Graph) -> Result<Option<Var>, ModelError> {
        let total: usize = self.terms.iter().map(|t| t.1).sum();
        let mut acc: Option<Var> = None;
        for (v, m) in self.terms {
            let w = g.scale(v, m as f64 / total as f64);
            acc = Some(match acc {
                Some(a) => g.add(a, w)?,
                None => w,
            });
        }
        for v in self.extra {
            acc = Some(match acc {
                Some(a) => g.add(a, v)?,
                None => v,
            });
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
enum Net {
    Sequence(SequenceNet),
    Tree(TreeNet),
    Graph(GraphNet),
}

/// A configured network with its vocabularies, label sets and parameters.
#[derive(Debug, Clone)]
pub struct SrlModel {
    pub cfg: ModelConfig,
    pub vocabs: Vocabularies,
    pub labels: Labels,
    pub rule: Option<DistanceTupleTable>,
    pub store: ParamStore,
    net: Net,
}

impl SrlModel {
    /// Builds vocabularies, labels and the soft-pruning rule from `train`
    /// and initializes parameters from `cfg.seed`.
    pub fn new(cfg: ModelConfig, train: &[Sentence]) -> Result<Self, ModelError> {
        Self::with_embeddings(cfg, train, None)
    }

    /// Like [`SrlModel::new`] with a pretrained word-vector file.
    pub fn with_embeddings(
        cfg: ModelConfig,
        train: &[Sentence],
        embeddings: Option<&Path>,
    ) -> Result<Self, ModelError> {
        cfg.validate()?;
        if train.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        check_style(train, cfg.style)?;
        let vocabs = build_vocab(train, cfg.min_count);
        let has_empty = train.iter().flat_map(|s| &s.frames).any(|f| f.sense.is_empty());
        let labels = Labels::new(cfg.style, &vocabs, has_empty);
        let rule = match cfg.syntax {
            SyntaxMode::SoftPrune { top_k } => Some(build_syntactic_rule(train, top_k)),
            _ => None,
        };
        let pretrained = match embeddings {
            Some(path) if cfg.word.pretrained > 0 => {
                Some(load_embeddings(path, &vocabs.form, cfg.word.pretrained, cfg.seed)?)
            }
            _ => None,
        };
        Self::from_parts(cfg, vocabs, labels, rule, pretrained)
    }

    pub fn from_parts(
        cfg: ModelConfig,
        vocabs: Vocabularies,
        labels: Labels,
        rule: Option<DistanceTupleTable>,
        pretrained: Option<Tensor>,
    ) -> Result<Self, ModelError> {
        cfg.validate()?;
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let net = {
            let mut p = ParamBuilder::new(&mut store, &mut rng);
            match cfg.factorization {
                Factorization::Sequence => Net::Sequence(SequenceNet::new(&mut p, &cfg, &vocabs, &labels, pretrained)?),
                Factorization::Tree => Net::Tree(TreeNet::new(&mut p, &cfg, &vocabs, &labels, pretrained)?),
                Factorization::Graph => Net::Graph(GraphNet::new(&mut p, &cfg, &vocabs, &labels, pretrained)?),
            }
        };
        Ok(SrlModel {
            cfg,
            vocabs,
            labels,
            rule,
            store,
            net,
        })
    }

    pub fn ctx(&self) -> Ctx<'_> {
        Ctx {
            cfg: &self.cfg,
            vocabs: &self.vocabs,
            labels: &self.labels,
            rule: self.rule.as_ref(),
        }
    }

    pub fn graph_net(&self) -> Option<&GraphNet> {
        match &self.net {
            Net::Graph(n) => Some(n),
            _ => None,
        }
    }

    /// Beam and pair scores of the graph factorization.
    pub fn graph_scores(&self, s: &Sentence) -> Result<GraphScores, ModelError> {
        let net = self
            .graph_net()
            .ok_or_else(|| ModelError::Config("not a graph model".into()))?;
        let prep = self.prepare(s)?;
        let mut g = Graph::new(&self.store);
        net.scores(&mut g, &self.ctx(), &prep)
    }

    /// Role and sense scores of one predicate-argument pair of the graph
    /// factorization, computed without beams.
    pub fn graph_pair_scores(
        &self,
        s: &Sentence,
        p: usize,
        span: (usize, usize),
    ) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        let net = self
            .graph_net()
            .ok_or_else(|| ModelError::Config("not a graph model".into()))?;
        let prep = self.prepare(s)?;
        let mut g = Graph::new(&self.store);
        net.pair_scores(&mut g, &self.ctx(), &prep, p, span)
    }

    pub fn prepare<'a>(&self, s: &'a Sentence) -> Result<Prepared<'a>, ModelError> {
        if s.is_empty() {
            return Err(ModelError::Corpus(CorpusError::Invalid(
                "sentence has no tokens".into(),
            )));
        }
        let syntax = match self.cfg.syntax {
            SyntaxMode::Encoder { .. } => Some(SyntaxInput::new(s, self.cfg.syntax_encoder.source)?),
            _ => None,
        };
        if matches!(self.cfg.syntax, SyntaxMode::ConstPrune) && s.consts.is_none() {
            return Err(ModelError::MissingTree("constituency"));
        }
        let mut predicates = Vec::new();
        if self.cfg.given_predicates {
            predicates = s.frames.iter().map(|f| f.predicate).collect();
            predicates.sort_unstable();
            predicates.dedup();
        }
        Ok(Prepared {
            sentence: s,
            ids: TokenIds::new(s, &self.vocabs),
            syntax,
            predicates,
        })
    }

    /// Training loss of one sentence on `g`; `None` when the sentence has
    /// no decisions.
    pub fn loss(&self, g: &mut Graph, s: &Sentence) -> Result<Option<Var>, ModelError> {
        let prep = self.prepare(s)?;
        let ctx = self.ctx();
        match &self.net {
            Net::Sequence(n) => n.loss(g, &ctx, &prep),
            Net::Tree(n) => n.loss(g, &ctx, &prep),
            Net::Graph(n) => n.loss(g, &ctx, &prep),
        }
    }

    pub fn predict(&self, s: &Sentence) -> Result<Prediction, ModelError> {
        let prep = self.prepare(s)?;
        let ctx = self.ctx();
        let mut g = Graph::new(&self.store);
        match &self.net {
            Net::Sequence(n) => n.predict(&mut g, &ctx, &prep),
            Net::Tree(n) => n.predict(&mut g, &ctx, &prep),
            Net::Graph(n) => n.predict(&mut g, &ctx, &prep),
        }
    }

    /// Predicts every sentence in parallel; output order follows input.
    pub fn predict_corpus(&self, sentences: &[Sentence]) -> Result<Vec<Prediction>, ModelError> {
        sentences.par_iter().map(|s| self.predict(s)).collect()
    }

    /// Sentences with predicted frames.
    pub fn annotate(&self, sentences: &[Sentence]) -> Result<Vec<Sentence>, ModelError> {
        let preds = self.predict_corpus(sentences)?;
        Ok(sentences.iter().zip(&preds).map(|(s, p)| p.apply(s)).collect())
    }
}

pub(crate) fn check_style(sentences: &[Sentence], want: Style) -> Result<(), ModelError> {
    for s in sentences {
        if let Some(got) = s.style() {
            if got != want {
                return Err(ModelError::StyleMismatch { got, want });
            }
        }
    }
    Ok(())
}
