use crate::corpus::{DepTree, Sentence, Vocab, Vocabularies};
use crate::layers::{BiLstm, Embedding, Gcn, LayerError, ParamBuilder, SaLstm, TokenIds, TreeLstm, WordRepr};
use crate::numcore::{Axis, Graph, ParamId, Tensor, Var};
use crate::treeops::{convert_constituency, BoundaryTag, ConvertedTree};

use super::config::{EncoderKind, ModelConfig, SyntaxMode, SyntaxSource};
use super::ModelError;

/// Tree input of a syntax encoder, precomputed per sentence.
#[derive(Debug, Clone)]
pub enum SyntaxInput {
    Dep(DepTree),
    Const {
        conv: ConvertedTree,
        nodes: DepTree,
        decomposition: Tensor,
        tags: Vec<usize>,
    },
}

impl SyntaxInput {
    pub fn new(s: &Sentence, source: SyntaxSource) -> Result<Self, ModelError> {
        match source {
            SyntaxSource::Dep => Ok(SyntaxInput::Dep(
                s.dep.clone().ok_or(ModelError::MissingTree("dependency"))?,
            )),
            SyntaxSource::Const => {
                let ct = s.consts.as_ref().ok_or(ModelError::MissingTree("constituency"))?;
                if ct.is_empty() {
                    return Err(ModelError::MissingTree("constituency"));
                }
                let conv = convert_constituency(ct);
                Ok(SyntaxInput::Const {
                    nodes: conv.as_dep_tree(),
                    decomposition: conv.decomposition_matrix(),
                    tags: conv.boundary_tags().into_iter().map(BoundaryTag::id).collect(),
                    conv,
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Stack {
    Gcn(Vec<Gcn>, ParamId),
    SaLstm(Vec<SaLstm>),
    TreeLstm(Vec<TreeLstm>),
}

/// GCN, SA-LSTM or Tree-LSTM layers over BiLSTM states.
#[derive(Debug, Clone)]
pub struct SyntaxEncoder {
    stack: Stack,
    source: SyntaxSource,
    spos: Option<Embedding>,
    out_dim: usize,
}

impl SyntaxEncoder {
    fn new(
        p: &mut ParamBuilder,
        kind: EncoderKind,
        cfg: &ModelConfig,
        d_in: usize,
        vocabs: &Vocabularies,
    ) -> Result<Self, ModelError> {
        let sc = cfg.syntax_encoder;
        let n_rel = match sc.source {
            SyntaxSource::Dep => vocabs.relation.len(),
            SyntaxSource::Const => vocabs.constituent.len(),
        };
        let mut d = match sc.source {
            SyntaxSource::Dep => d_in,
            SyntaxSource::Const => 2 * d_in,
        };
        let stack = match kind {
            EncoderKind::Gcn => {
                let root = p.matrix("root", 1, d)?;
                let mut layers = Vec::new();
                for l in 0..sc.layers {
                    layers.push(Gcn::new(&mut p.sub(&format!("gcn{}", l)), d, sc.dim, n_rel)?);
                    d = sc.dim;
                }
                Stack::Gcn(layers, root)
            }
            EncoderKind::SaLstm => {
                let mut layers = Vec::new();
                for l in 0..sc.layers {
                    let layer = SaLstm::new(&mut p.sub(&format!("salstm{}", l)), d, sc.dim, n_rel)?;
                    d = layer.out_dim();
                    layers.push(layer);
                }
                Stack::SaLstm(layers)
            }
            EncoderKind::TreeLstm => {
                let mut layers = Vec::new();
                for l in 0..sc.layers {
                    let layer = TreeLstm::new(&mut p.sub(&format!("treelstm{}", l)), d, sc.dim, n_rel)?;
                    d = layer.out_dim();
                    layers.push(layer);
                }
                Stack::TreeLstm(layers)
            }
        };
        let spos = match sc.source {
            SyntaxSource::Const if sc.spos_dim > 0 => Some(Embedding::new(p, "spos", BoundaryTag::COUNT, sc.spos_dim)?),
            _ => None,
        };
        let out_dim = d + spos.as_ref().map_or(0, |e| e.dim);
        Ok(SyntaxEncoder {
            stack,
            source: sc.source,
            spos,
            out_dim,
        })
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn run(&self, g: &mut Graph, x: Var, tree: &DepTree, rel: &Vocab) -> Result<Var, ModelError> {
        Ok(match &self.stack {
            Stack::Gcn(layers, root) => {
                let r = g.param(*root);
                let mut h = g.concat(&[r, x], Axis::Rows)?;
                for l in layers {
                    h = l.forward(g, h, tree, rel)?;
                }
                g.slice(h, Axis::Rows, 1, tree.len())?
            }
            Stack::SaLstm(layers) => {
                let mut h = x;
                for l in layers {
                    h = l.forward(g, h, tree, rel)?;
                }
                h
            }
            Stack::TreeLstm(layers) => {
                let mut h = x;
                for l in layers {
                    h = l.forward(g, h, tree, rel)?;
                }
                h
            }
        })
    }

    /// `states` is n x d; returns n x out_dim.
    pub fn forward(
        &self,
        g: &mut Graph,
        states: Var,
        input: &SyntaxInput,
        vocabs: &Vocabularies,
    ) -> Result<Var, ModelError> {
        match (input, self.source) {
            (SyntaxInput::Dep(tree), SyntaxSource::Dep) => self.run(g, states, tree, &vocabs.relation),
            (
                SyntaxInput::Const {
                    conv,
                    nodes,
                    decomposition,
                    tags,
                },
                SyntaxSource::Const,
            ) => {
                let starts: Vec<usize> = conv.nodes.iter().map(|b| b.start - 1).collect();
                let ends: Vec<usize> = conv.nodes.iter().map(|b| b.end - 1).collect();
                let s = g.gather(states, &starts)?;
                let e = g.gather(states, &ends)?;
                let x = g.concat(&[s, e], Axis::Cols)?;
                let node_out = self.run(g, x, nodes, &vocabs.constituent)?;
                let d = g.constant(decomposition.clone());
                let tok = g.matmul(d, node_out)?;
                match &self.spos {
                    Some(e) => {
                        let t = e.lookup(g, tags)?;
                        Ok(g.concat(&[tok, t], Axis::Cols)?)
                    }
                    None => Ok(tok),
                }
            }
            _ => Err(ModelError::Config(
                "syntax input does not match the encoder source".into(),
            )),
        }
    }
}

/// Word representation, BiLSTM, and an optional syntax encoder whose
/// output is concatenated to the BiLSTM states.
#[derive(Debug, Clone)]
pub struct SentenceEncoder {
    pub word: WordRepr,
    pub bilstm: BiLstm,
    pub syntax: Option<SyntaxEncoder>,
}

impl SentenceEncoder {
    pub fn new(
        p: &mut ParamBuilder,
        cfg: &ModelConfig,
        vocabs: &Vocabularies,
        pretrained: Option<Tensor>,
    ) -> Result<Self, ModelError> {
        let word = WordRepr::new(&mut p.sub("word"), cfg.word, vocabs, pretrained, cfg.seed)?;
        let bilstm = BiLstm::new(&mut p.sub("bilstm"), word.out_dim(), &cfg.encoder)?;
        let syntax = match cfg.syntax {
            SyntaxMode::Encoder { kind } => Some(SyntaxEncoder::new(
                &mut p.sub("syntax"),
                kind,
                cfg,
                bilstm.out_dim(),
                vocabs,
            )?),
            _ => None,
        };
        Ok(SentenceEncoder { word, bilstm, syntax })
    }

    pub fn out_dim(&self) -> usize {
        self.bilstm.out_dim() + self.syntax.as_ref().map_or(0, SyntaxEncoder::out_dim)
    }

    pub fn lexical(&self, g: &mut Graph, ids: &TokenIds) -> Result<Option<Var>, ModelError> {
        Ok(self.word.lexical(g, ids)?)
    }

    /// Encodes the rows of `lexical` with indicator `flags`.
    pub fn encode(
        &self,
        g: &mut Graph,
        lexical: Option<Var>,
        flags: &[usize],
        syntax: Option<&SyntaxInput>,
        vocabs: &Vocabularies,
    ) -> Result<Var, ModelError> {
        let x = self.word.with_indicator(g, lexical, flags)?;
        let h = self.bilstm.encode(g, x)?;
        match (&self.syntax, syntax) {
            (Some(enc), Some(input)) => {
                let s = enc.forward(g, h, input, vocabs)?;
                Ok(g.concat(&[h, s], Axis::Cols)?)
            }
            (Some(_), None) => Err(ModelError::MissingTree("syntax encoder input")),
            (None, _) => Ok(h),
        }
    }
}

impl From<LayerError> for ModelError {
    fn from(e: LayerError) -> Self {
        ModelError::Layer(e)
    }
}
