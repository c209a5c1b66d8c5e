use crate::numcore::{Axis, Graph, NumError, Tensor, Var};

use super::linear::{Embedding, Mlp};
use super::{LayerError, ParamBuilder};

/// Width buckets `1, 2, 3, 4, 5-7, 8-15, 16-30, >30`.
pub const SIZE_BUCKETS: usize = 8;

pub fn size_bucket(width: usize) -> usize {
    match width {
        0..=4 => width.saturating_sub(1),
        5..=7 => 4,
        8..=15 => 5,
        16..=30 => 6,
        _ => 7,
    }
}

/// `[g_start, g_end, Σ ν_t g_t, size(width)]` with attention weights `ν`
/// from a softmax over the span of `w · MLP(g_t)`.
#[derive(Debug, Clone)]
pub struct SpanRepr {
    pub attn: Mlp,
    pub size: Embedding,
    pub d: usize,
}

impl SpanRepr {
    pub fn new(p: &mut ParamBuilder, d: usize, attn_hidden: usize, size_dim: usize) -> Result<Self, NumError> {
        Ok(SpanRepr {
            attn: Mlp::without_out_bias(&mut p.sub("attn"), d, &[attn_hidden], 1)?,
            size: Embedding::new(p, "size", SIZE_BUCKETS, size_dim)?,
            d,
        })
    }

    pub fn out_dim(&self) -> usize {
        3 * self.d + self.size.dim
    }

    /// Attention weights, one row per span over all n positions (zero
    /// outside the span).
    pub fn attention(&self, g: &mut Graph, states: Var, spans: &[(usize, usize)]) -> Result<Var, LayerError> {
        let n = g.value(states).rows();
        if spans.is_empty() {
            return Err(NumError::Shape {
                op: "span_repr",
                detail: "no spans".into(),
            }
            .into());
        }
        let mut mask = Tensor::filled(&[spans.len(), n], f64::NEG_INFINITY);
        for (i, &(s, e)) in spans.iter().enumerate() {
            if s < 1 || s > e || e > n {
                return Err(LayerError::InvalidSpan(s, e));
            }
            for t in s..=e {
                mask.set(i, t - 1, 0.0);
            }
        }
        let logits = self.attn.forward(g, states)?;
        let lt = g.transpose(logits);
        let ones = g.constant(Tensor::filled(&[spans.len(), 1], 1.0));
        let tiled = g.matmul(ones, lt)?;
        let mask = g.constant(mask);
        let masked = g.add(tiled, mask)?;
        Ok(g.softmax(masked, Axis::Cols))
    }

    /// m x out_dim, one row per span (1-based inclusive bounds).
    pub fn forward(&self, g: &mut Graph, states: Var, spans: &[(usize, usize)]) -> Result<Var, LayerError> {
        let nu = self.attention(g, states, spans)?;
        let head = g.matmul(nu, states)?;
        let starts: Vec<usize> = spans.iter().map(|s| s.0 - 1).collect();
        let ends: Vec<usize> = spans.iter().map(|s| s.1 - 1).collect();
        let buckets: Vec<usize> = spans.iter().map(|s| size_bucket(s.1 + 1 - s.0)).collect();
        let gs = g.gather(states, &starts)?;
        let ge = g.gather(states, &ends)?;
        let sz = self.size.lookup(g, &buckets)?;
        Ok(g.concat(&[gs, ge, head, sz], Axis::Cols)?)
    }
}

/// Scalar score per row: `w · MLP(x)`.
#[derive(Debug, Clone)]
pub struct Unary {
    pub mlp: Mlp,
}

impl Unary {
    pub fn new(p: &mut ParamBuilder, d: usize, hidden: usize) -> Result<Self, NumError> {
        Ok(Unary {
            mlp: Mlp::new(p, d, &[hidden], 1)?,
        })
    }

    /// rows x 1.
    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<Var, NumError> {
        self.mlp.forward(g, x)
    }
}
