use crate::numcore::{Axis, Graph, NumError, ParamId, Var};

use super::linear::Linear;
use super::ParamBuilder;

/// Two ReLU projections of the encoder states: one into predicate space,
/// one into argument space.
#[derive(Debug, Clone)]
pub struct AffineHeads {
    pub pred: Linear,
    pub arg: Linear,
}

impl AffineHeads {
    pub fn new(p: &mut ParamBuilder, d_in: usize, d_h: usize) -> Result<Self, NumError> {
        Ok(AffineHeads {
            pred: Linear::new(&mut p.sub("pred"), d_in, d_h)?,
            arg: Linear::new(&mut p.sub("arg"), d_in, d_h)?,
        })
    }

    /// `(h_pred, h_arg)`, each rows x d_h.
    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<(Var, Var), NumError> {
        let zp = self.pred.forward(g, x)?;
        let za = self.arg.forward(g, x)?;
        Ok((g.relu(zp), g.relu(za)))
    }
}

/// Pair scorer `s[k] = a^T W[:,k,:] p + U[k,:]·[a; p] + b[k]`.
///
/// `W` is stored as `d_arg x n_r x d_pred`, `U` as `n_r x (d_arg + d_pred)`.
#[derive(Debug, Clone)]
pub struct Biaffine {
    pub w: ParamId,
    pub u: ParamId,
    pub b: ParamId,
    pub d_arg: usize,
    pub d_pred: usize,
    pub n_r: usize,
}

impl Biaffine {
    pub fn new(p: &mut ParamBuilder, d_arg: usize, d_pred: usize, n_r: usize) -> Result<Self, NumError> {
        Ok(Biaffine {
            w: p.glorot("w", &[d_arg, n_r, d_pred])?,
            u: p.matrix("u", n_r, d_arg + d_pred)?,
            b: p.bias("b", n_r)?,
            d_arg,
            d_pred,
            n_r,
        })
    }

    /// Scores every row of `args` (m x d_arg) against the single predicate
    /// vector `pred` (1 x d_pred); returns m x n_r.
    pub fn score(&self, g: &mut Graph, args: Var, pred: Var) -> Result<Var, NumError> {
        let m = g.value(args).rows();
        let w = g.param(self.w);
        let aw = g.matmul(args, w)?;
        let aw = g.reshape(aw, &[m * self.n_r, self.d_pred])?;
        let pt = g.transpose(pred);
        let bil = g.matmul(aw, pt)?;
        let bil = g.reshape(bil, &[m, self.n_r])?;

        let u = g.param(self.u);
        let ut = g.transpose(u);
        let ua = g.slice(ut, Axis::Rows, 0, self.d_arg)?;
        let up = g.slice(ut, Axis::Rows, self.d_arg, self.d_pred)?;
        let lin_a = g.matmul(args, ua)?;
        let lin_p = g.matmul(pred, up)?;
        let s = g.add(bil, lin_a)?;
        let s = g.add_row(s, lin_p)?;
        let b = g.param(self.b);
        g.add_row(s, b)
    }
}
