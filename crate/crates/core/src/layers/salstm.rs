use crate::corpus::{DepTree, Vocab};
use crate::numcore::{Axis, Graph, NumError, ParamId, Tensor, Var};

use super::ParamBuilder;

/// Syntax-aware LSTM: a standard LSTM whose hidden state adds a gated
/// summary of the already-processed tree neighbors,
/// `h_k = o ⊙ tanh(c_k) + s ⊙ tanh(Σ α_rel · h_j)`, run in both directions.
#[derive(Debug, Clone)]
pub struct SaLstm {
    dirs: [Direction; 2],
    pub alpha: ParamId,
    pub hidden: usize,
}

#[derive(Debug, Clone)]
struct Direction {
    w: ParamId,
    u: ParamId,
    b: ParamId,
}

impl SaLstm {
    pub fn new(p: &mut ParamBuilder, d_in: usize, hidden: usize, n_relations: usize) -> Result<Self, NumError> {
        let mut dir = |name: &str| -> Result<Direction, NumError> {
            let mut p = p.sub(name);
            Ok(Direction {
                w: p.matrix("w", d_in, 5 * hidden)?,
                u: p.matrix("u", hidden, 5 * hidden)?,
                b: p.bias("b", 5 * hidden)?,
            })
        };
        let dirs = [dir("fwd")?, dir("bwd")?];
        Ok(SaLstm {
            dirs,
            alpha: p.tensor("alpha", Tensor::filled(&[n_relations, 1], 1.0))?,
            hidden,
        })
    }

    pub fn out_dim(&self) -> usize {
        2 * self.hidden
    }

    /// n x d_in -> n x 2·hidden.
    pub fn forward(&self, g: &mut Graph, x: Var, tree: &DepTree, relations: &Vocab) -> Result<Var, NumError> {
        let n = tree.len();
        let n_rel = g.store().value(self.alpha).rows();
        // neighbors[k] = (j, relation id) for every tree edge between tokens
        let mut neighbors: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for dep in 1..=n {
            let head = tree.head(dep);
            if head > 0 {
                let r = relations.id(tree.rel(dep)).min(n_rel - 1);
                neighbors[dep - 1].push((head - 1, r));
                neighbors[head - 1].push((dep - 1, r));
            }
        }
        let f = self.run(g, x, &neighbors, &self.dirs[0], false)?;
        let b = self.run(g, x, &neighbors, &self.dirs[1], true)?;
        g.concat(&[f, b], Axis::Cols)
    }

    fn run(
        &self,
        g: &mut Graph,
        x: Var,
        neighbors: &[Vec<(usize, usize)>],
        d: &Direction,
        reverse: bool,
    ) -> Result<Var, NumError> {
        let n = neighbors.len();
        let h = self.hidden;
        let w = g.param(d.w);
        let u = g.param(d.u);
        let b = g.param(d.b);
        let alpha = g.param(self.alpha);
        let xw = g.matmul(x, w)?;
        let xw = g.add_row(xw, b)?;
        let order: Vec<usize> = if reverse {
            (0..n).rev().collect()
        } else {
            (0..n).collect()
        };
        let mut rank = vec![0; n];
        for (r, &t) in order.iter().enumerate() {
            rank[t] = r;
        }
        let mut states: Vec<Option<Var>> = vec![None; n];
        let mut prev: Option<(Var, Var)> = None;
        for &t in &order {
            let mut z = g.row(xw, t)?;
            if let Some((hp, _)) = prev {
                let hu = g.matmul(hp, u)?;
                z = g.add(z, hu)?;
            }
            let gi = g.slice(z, Axis::Cols, 0, h)?;
            let gf = g.slice(z, Axis::Cols, h, h)?;
            let go = g.slice(z, Axis::Cols, 2 * h, h)?;
            let gu = g.slice(z, Axis::Cols, 3 * h, h)?;
            let gs = g.slice(z, Axis::Cols, 4 * h, h)?;
            let i = g.sigmoid(gi);
            let o = g.sigmoid(go);
            let s = g.sigmoid(gs);
            let cand = g.tanh(gu);
            let mut c = g.mul(i, cand)?;
            if let Some((_, cp)) = prev {
                let f = g.sigmoid(gf);
                let fc = g.mul(f, cp)?;
                c = g.add(c, fc)?;
            }
            let tc = g.tanh(c);
            let mut hs = g.mul(o, tc)?;

            let earlier: Vec<(usize, usize)> = neighbors[t]
                .iter()
                .copied()
                .filter(|&(j, _)| rank[j] < rank[t])
                .collect();
            if !earlier.is_empty() {
                let rows: Vec<Var> = earlier
                    .iter()
                    .map(|&(j, _)| states[j].expect("processed earlier"))
                    .collect();
                let hj = g.concat(&rows, Axis::Rows)?;
                let rels: Vec<usize> = earlier.iter().map(|&(_, r)| r).collect();
                let a = g.gather(alpha, &rels)?;
                let weighted = g.scale_rows(hj, a)?;
                let summed = g.sum(weighted, Axis::Rows);
                let tilde = g.tanh(summed);
                let st = g.mul(s, tilde)?;
                hs = g.add(hs, st)?;
            }
            states[t] = Some(hs);
            prev = Some((hs, c));
        }
        let rows: Vec<Var> = states.into_iter().map(|s| s.expect("every step ran")).collect();
        g.concat(&rows, Axis::Rows)
    }
}
