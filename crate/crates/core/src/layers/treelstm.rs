use crate::corpus::{DepTree, Vocab};
use crate::numcore::{Axis, Graph, NumError, ParamId, Tensor, Var};
use crate::treeops::children_map;

use super::ParamBuilder;

/// Bottom-up child-sum Tree-LSTM with per-child forget gates and a
/// relation gate on each child's contribution:
/// `r_j = σ(x_k W_r + h_j U_r + b_rel(j))`, `h̃_k = Σ r_j ⊙ h_j`.
#[derive(Debug, Clone)]
pub struct TreeLstm {
    /// Fused input weights for `i, o, u, f, r`.
    pub w: ParamId,
    /// Fused recurrent weights for `i, o, u` applied to `h̃`.
    pub u_iou: ParamId,
    pub u_f: ParamId,
    pub u_r: ParamId,
    pub b: ParamId,
    pub b_rel: ParamId,
    pub hidden: usize,
}

impl TreeLstm {
    pub fn new(p: &mut ParamBuilder, d_in: usize, hidden: usize, n_relations: usize) -> Result<Self, NumError> {
        Ok(TreeLstm {
            w: p.matrix("w", d_in, 5 * hidden)?,
            u_iou: p.matrix("u_iou", hidden, 3 * hidden)?,
            u_f: p.matrix("u_f", hidden, hidden)?,
            u_r: p.matrix("u_r", hidden, hidden)?,
            b: p.bias("b", 4 * hidden)?,
            b_rel: p.tensor("b_rel", Tensor::zeros(&[n_relations, hidden]))?,
            hidden,
        })
    }

    pub fn out_dim(&self) -> usize {
        self.hidden
    }

    /// n x d_in -> n x hidden, one state per tree node.
    pub fn forward(&self, g: &mut Graph, x: Var, tree: &DepTree, relations: &Vocab) -> Result<Var, NumError> {
        let n = tree.len();
        let h = self.hidden;
        let n_rel = g.store().value(self.b_rel).rows();
        let children = children_map(tree);
        let w = g.param(self.w);
        let xw = g.matmul(x, w)?;
        let b = g.param(self.b);
        let u_iou = g.param(self.u_iou);
        let u_f = g.param(self.u_f);
        let u_r = g.param(self.u_r);
        let b_rel = g.param(self.b_rel);
        let xw_gates = g.slice(xw, Axis::Cols, 0, 4 * h)?;
        let xw_gates = g.add_row(xw_gates, b)?;
        let xw_r = g.slice(xw, Axis::Cols, 4 * h, h)?;

        let mut order: Vec<usize> = (1..=n).collect();
        order.sort_by_key(|&k| std::cmp::Reverse(tree.depth(k)));
        let mut hs: Vec<Option<Var>> = vec![None; n + 1];
        let mut cs: Vec<Option<Var>> = vec![None; n + 1];
        for k in order {
            let xk = g.row(xw_gates, k - 1)?;
            let ch = &children[k];
            let mut z_iou = g.slice(xk, Axis::Cols, 0, 3 * h)?;
            let mut fsum = None;
            if !ch.is_empty() {
                let hc_rows: Vec<Var> = ch.iter().map(|&j| hs[j].expect("children first")).collect();
                let cc_rows: Vec<Var> = ch.iter().map(|&j| cs[j].expect("children first")).collect();
                let hc = g.concat(&hc_rows, Axis::Rows)?;
                let cc = g.concat(&cc_rows, Axis::Rows)?;
                let rels: Vec<usize> = ch.iter().map(|&j| relations.id(tree.rel(j)).min(n_rel - 1)).collect();

                let xr = g.row(xw_r, k - 1)?;
                let hr = g.matmul(hc, u_r)?;
                let br = g.gather(b_rel, &rels)?;
                let r = g.add(hr, br)?;
                let r = g.add_row(r, xr)?;
                let r = g.sigmoid(r);
                let rh = g.mul(r, hc)?;
                let tilde = g.sum(rh, Axis::Rows);
                let tu = g.matmul(tilde, u_iou)?;
                z_iou = g.add(z_iou, tu)?;

                let xf = g.slice(xk, Axis::Cols, 3 * h, h)?;
                let hf = g.matmul(hc, u_f)?;
                let f = g.add_row(hf, xf)?;
                let f = g.sigmoid(f);
                let fc = g.mul(f, cc)?;
                fsum = Some(g.sum(fc, Axis::Rows));
            }
            let gi = g.slice(z_iou, Axis::Cols, 0, h)?;
            let go = g.slice(z_iou, Axis::Cols, h, h)?;
            let gu = g.slice(z_iou, Axis::Cols, 2 * h, h)?;
            let i = g.sigmoid(gi);
            let o = g.sigmoid(go);
            let u = g.tanh(gu);
            let mut c = g.mul(i, u)?;
            if let Some(fs) = fsum {
                c = g.add(c, fs)?;
            }
            let tc = g.tanh(c);
            hs[k] = Some(g.mul(o, tc)?);
            cs[k] = Some(c);
        }
        let rows: Vec<Var> = hs[1..].iter().map(|h| h.expect("every node ran")).collect();
        g.concat(&rows, Axis::Rows)
    }
}
