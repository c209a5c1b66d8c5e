use serde::{Deserialize, Serialize};

use crate::numcore::{Axis, Graph, NumError, ParamId, Var};

use super::ParamBuilder;

/// Single-direction LSTM with gates ordered `i, f, o, u` in the fused
/// weight matrices.
#[derive(Debug, Clone)]
pub struct Lstm {
    pub w: ParamId,
    pub u: ParamId,
    pub b: ParamId,
    pub hidden: usize,
}

impl Lstm {
    pub fn new(p: &mut ParamBuilder, d_in: usize, hidden: usize) -> Result<Self, NumError> {
        Ok(Lstm {
            w: p.matrix("w", d_in, 4 * hidden)?,
            u: p.matrix("u", hidden, 4 * hidden)?,
            b: p.bias("b", 4 * hidden)?,
            hidden,
        })
    }

    /// Runs over the rows of `x` (left to right, or right to left when
    /// `reverse`) and returns the hidden states in input order, n x hidden.
    /// `keep` applies dropout to the recurrent state between timesteps.
    pub fn run(&self, g: &mut Graph, x: Var, reverse: bool, keep: f64) -> Result<Var, NumError> {
        let n = g.value(x).rows();
        let h = self.hidden;
        let w = g.param(self.w);
        let u = g.param(self.u);
        let b = g.param(self.b);
        let xw = g.matmul(x, w)?;
        let xw = g.add_row(xw, b)?;
        let order: Vec<usize> = if reverse {
            (0..n).rev().collect()
        } else {
            (0..n).collect()
        };
        let mut states = vec![None; n];
        let mut prev: Option<(Var, Var)> = None;
        for &t in &order {
            let mut z = g.row(xw, t)?;
            if let Some((hp, _)) = prev {
                let hp = g.dropout(hp, keep);
                let hu = g.matmul(hp, u)?;
                z = g.add(z, hu)?;
            }
            let gi = g.slice(z, Axis::Cols, 0, h)?;
            let gf = g.slice(z, Axis::Cols, h, h)?;
            let go = g.slice(z, Axis::Cols, 2 * h, h)?;
            let gu = g.slice(z, Axis::Cols, 3 * h, h)?;
            let i = g.sigmoid(gi);
            let o = g.sigmoid(go);
            let cand = g.tanh(gu);
            let mut c = g.mul(i, cand)?;
            if let Some((_, cp)) = prev {
                let f = g.sigmoid(gf);
                let fc = g.mul(f, cp)?;
                c = g.add(c, fc)?;
            }
            let tc = g.tanh(c);
            let hs = g.mul(o, tc)?;
            states[t] = Some(hs);
            prev = Some((hs, c));
        }
        let rows: Vec<Var> = states.into_iter().map(|s| s.expect("every step ran")).collect();
        g.concat(&rows, Axis::Rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub layers: usize,
    pub hidden: usize,
    pub dropout_keep: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            layers: 3,
            hidden: 400,
            dropout_keep: 0.8,
        }
    }
}

/// Stacked bidirectional LSTM; each layer outputs `[forward, backward]`.
#[derive(Debug, Clone)]
pub struct BiLstm {
    pub layers: Vec<(Lstm, Lstm)>,
    pub keep: f64,
}

impl BiLstm {
    pub fn new(p: &mut ParamBuilder, d_in: usize, cfg: &EncoderConfig) -> Result<Self, NumError> {
        let mut layers = Vec::new();
        let mut d = d_in;
        for l in 0..cfg.layers.max(1) {
            let mut p = p.sub(&format!("l{}", l));
            let f = Lstm::new(&mut p.sub("fwd"), d, cfg.hidden)?;
            let b = Lstm::new(&mut p.sub("bwd"), d, cfg.hidden)?;
            layers.push((f, b));
            d = 2 * cfg.hidden;
        }
        Ok(BiLstm {
            layers,
            keep: cfg.dropout_keep,
        })
    }

    pub fn out_dim(&self) -> usize {
        2 * self.layers[0].0.hidden
    }

    /// n x d -> n x 2·hidden.
    pub fn encode(&self, g: &mut Graph, x: Var) -> Result<Var, NumError> {
        let mut x = x;
        for (l, (f, b)) in self.layers.iter().enumerate() {
            if l > 0 {
                x = g.dropout(x, self.keep);
            }
            let hf = f.run(g, x, false, self.keep)?;
            let hb = b.run(g, x, true, self.keep)?;
            x = g.concat(&[hf, hb], Axis::Cols)?;
        }
        Ok(x)
    }
}
