use crate::numcore::{Axis, Graph, Tensor, Var};

use super::linear::{Embedding, Linear};
use super::lstm::Lstm;
use super::{LayerError, ParamBuilder};

pub const CHAR_DIM: usize = 30;
pub const CHAR_FILTERS: usize = 50;
const WIDTH: usize = 3;

/// Character embeddings -> width-3 convolution (same padding, ReLU) ->
/// BiLSTM; the word vector is `[last forward state, first backward state]`.
#[derive(Debug, Clone)]
pub struct CharEncoder {
    emb: Embedding,
    conv: Linear,
    fwd: Lstm,
    bwd: Lstm,
}

impl CharEncoder {
    /// `out_dim` is split evenly over the two directions.
    pub fn new(p: &mut ParamBuilder, n_chars: usize, out_dim: usize) -> Result<Self, LayerError> {
        Ok(CharEncoder {
            emb: Embedding::new(p, "emb", n_chars, CHAR_DIM)?,
            conv: Linear::new(&mut p.sub("conv"), WIDTH * CHAR_DIM, CHAR_FILTERS)?,
            fwd: Lstm::new(&mut p.sub("fwd"), CHAR_FILTERS, out_dim / 2)?,
            bwd: Lstm::new(&mut p.sub("bwd"), CHAR_FILTERS, out_dim / 2)?,
        })
    }

    pub fn out_dim(&self) -> usize {
        2 * self.fwd.hidden
    }

    /// 1 x out_dim vector for one word.
    pub fn encode(&self, g: &mut Graph, char_ids: &[usize]) -> Result<Var, LayerError> {
        let len = char_ids.len();
        if len == 0 {
            return Err(LayerError::EmptyWord);
        }
        let e = self.emb.lookup(g, char_ids)?;
        let pad = g.constant(Tensor::zeros(&[1, CHAR_DIM]));
        let padded = g.concat(&[pad, e, pad], Axis::Rows)?;
        let windows: Vec<Var> = (0..WIDTH)
            .map(|k| g.slice(padded, Axis::Rows, k, len))
            .collect::<Result<_, _>>()?;
        let cols = g.concat(&windows, Axis::Cols)?;
        let conv = self.conv.forward(g, cols)?;
        let feats = g.relu(conv);
        let hf = self.fwd.run(g, feats, false, 1.0)?;
        let hb = self.bwd.run(g, feats, true, 1.0)?;
        let last = g.row(hf, len - 1)?;
        let first = g.row(hb, 0)?;
        Ok(g.concat(&[last, first], Axis::Cols)?)
    }
}
