use crate::numcore::{Graph, NumError, ParamId, Var};

use super::ParamBuilder;

/// `x W + b` over the rows of `x`.
#[derive(Debug, Clone)]
pub struct Linear {
    pub w: ParamId,
    pub b: Option<ParamId>,
    pub d_in: usize,
    pub d_out: usize,
}

impl Linear {
    pub fn new(p: &mut ParamBuilder, d_in: usize, d_out: usize) -> Result<Self, NumError> {
        Ok(Linear {
            w: p.matrix("w", d_in, d_out)?,
            b: Some(p.bias("b", d_out)?),
            d_in,
            d_out,
        })
    }

    /// `x W` only.
    pub fn without_bias(p: &mut ParamBuilder, d_in: usize, d_out: usize) -> Result<Self, NumError> {
        Ok(Linear {
            w: p.matrix("w", d_in, d_out)?,
            b: None,
            d_in,
            d_out,
        })
    }

    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<Var, NumError> {
        let w = g.param(self.w);
        let xw = g.matmul(x, w)?;
        match self.b {
            Some(b) => {
                let b = g.param(b);
                g.add_row(xw, b)
            }
            None => Ok(xw),
        }
    }
}

/// ReLU hidden layers followed by a linear output layer.
#[derive(Debug, Clone)]
pub struct Mlp {
    pub hidden: Vec<Linear>,
    pub out: Linear,
}

impl Mlp {
    pub fn new(p: &mut ParamBuilder, d_in: usize, hidden: &[usize], d_out: usize) -> Result<Self, NumError> {
        Mlp::build(p, d_in, hidden, d_out, true)
    }

    /// Same shape, but the output layer has no bias.
    pub fn without_out_bias(
        p: &mut ParamBuilder,
        d_in: usize,
        hidden: &[usize],
        d_out: usize,
    ) -> Result<Self, NumError> {
        Mlp::build(p, d_in, hidden, d_out, false)
    }

    fn build(
        p: &mut ParamBuilder,
        d_in: usize,
        hidden: &[usize],
        d_out: usize,
        out_bias: bool,
    ) -> Result<Self, NumError> {
        let mut layers = Vec::new();
        let mut d = d_in;
        for (i, &h) in hidden.iter().enumerate() {
            layers.push(Linear::new(&mut p.sub(&format!("h{}", i)), d, h)?);
            d = h;
        }
        let mut po = p.sub("out");
        let out = if out_bias {
            Linear::new(&mut po, d, d_out)?
        } else {
            Linear::without_bias(&mut po, d, d_out)?
        };
        Ok(Mlp { hidden: layers, out })
    }

    pub fn forward(&self, g: &mut Graph, x: Var) -> Result<Var, NumError> {
        let mut h = x;
        for l in &self.hidden {
            let z = l.forward(g, h)?;
            h = g.relu(z);
        }
        self.out.forward(g, h)
    }
}

/// Lookup table; row `i` embeds symbol id `i`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub table: ParamId,
    pub dim: usize,
}

impl Embedding {
    pub fn new(p: &mut ParamBuilder, name: &str, rows: usize, dim: usize) -> Result<Self, NumError> {
        Ok(Embedding {
            table: p.matrix(name, rows, dim)?,
            dim,
        })
    }

    pub fn lookup(&self, g: &mut Graph, ids: &[usize]) -> Result<Var, NumError> {
        let t = g.param(self.table);
        g.gather(t, ids)
    }
}
