use crate::corpus::{DepTree, Vocab};
use crate::numcore::{Graph, NumError, ParamId, Tensor, Var};

use super::ParamBuilder;

const ALONG: usize = 0;
const OPPOSITE: usize = 1;
const SELF_LOOP: usize = 2;

/// Syntactic GCN layer over a dependency tree with a ROOT node.
///
/// For node `k` and each neighbor `j` (head, children, itself):
/// `u = x_j W_dir + b_label`, `gate = σ(x_k · w_g,dir + b_g,label)`, and
/// `v_k = ReLU(Σ gate · u)`. The self-loop uses a reserved label id one
/// past the relation vocabulary.
#[derive(Debug, Clone)]
pub struct Gcn {
    pub w: [ParamId; 3],
    pub wg: [ParamId; 3],
    pub b_label: ParamId,
    pub bg_label: ParamId,
    pub d_out: usize,
    n_labels: usize,
}

struct Edge {
    k: usize,
    j: usize,
    label: usize,
}

impl Gcn {
    pub fn new(p: &mut ParamBuilder, d_in: usize, d_out: usize, n_relations: usize) -> Result<Self, NumError> {
        let n_labels = n_relations + 1;
        let mut w = [ParamId(0); 3];
        let mut wg = [ParamId(0); 3];
        for (d, name) in ["along", "opposite", "self"].iter().enumerate() {
            w[d] = p.matrix(&format!("w_{}", name), d_in, d_out)?;
            wg[d] = p.matrix(&format!("wg_{}", name), d_in, 1)?;
        }
        Ok(Gcn {
            w,
            wg,
            b_label: p.tensor("b_label", Tensor::zeros(&[n_labels, d_out]))?,
            bg_label: p.tensor("bg_label", Tensor::zeros(&[n_labels, 1]))?,
            d_out,
            n_labels,
        })
    }

    fn edges(&self, tree: &DepTree, relations: &Vocab) -> [Vec<Edge>; 3] {
        let self_label = self.n_labels - 1;
        let label = |i: usize| relations.id(tree.rel(i)).min(self_label - 1);
        let mut e: [Vec<Edge>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for k in 0..=tree.len() {
            e[SELF_LOOP].push(Edge {
                k,
                j: k,
                label: self_label,
            });
        }
        for dep in 1..=tree.len() {
            let head = tree.head(dep);
            let l = label(dep);
            e[ALONG].push(Edge {
                k: dep,
                j: head,
                label: l,
            });
            e[OPPOSITE].push(Edge {
                k: head,
                j: dep,
                label: l,
            });
        }
        e
    }

    /// `x` is (n+1) x d_in with row 0 for ROOT; returns (n+1) x d_out.
    pub fn forward(&self, g: &mut Graph, x: Var, tree: &DepTree, relations: &Vocab) -> Result<Var, NumError> {
        let rows = tree.len() + 1;
        if g.value(x).rows() != rows {
            return Err(NumError::Shape {
                op: "gcn",
                detail: format!("{} node rows for a {}-token tree", g.value(x).rows(), tree.len()),
            });
        }
        let b_label = g.param(self.b_label);
        let bg_label = g.param(self.bg_label);
        let mut total = None;
        for (d, edges) in self.edges(tree, relations).iter().enumerate() {
            if edges.is_empty() {
                continue;
            }
            let js: Vec<usize> = edges.iter().map(|e| e.j).collect();
            let ks: Vec<usize> = edges.iter().map(|e| e.k).collect();
            let labels: Vec<usize> = edges.iter().map(|e| e.label).collect();
            let w = g.param(self.w[d]);
            let xw = g.matmul(x, w)?;
            let u = g.gather(xw, &js)?;
            let bl = g.gather(b_label, &labels)?;
            let u = g.add(u, bl)?;
            let wg = g.param(self.wg[d]);
            let xg = g.matmul(x, wg)?;
            let gk = g.gather(xg, &ks)?;
            let bgl = g.gather(bg_label, &labels)?;
            let gate = g.add(gk, bgl)?;
            let gate = g.sigmoid(gate);
            let gated = g.scale_rows(u, gate)?;
            let mut inc = Tensor::zeros(&[rows, edges.len()]);
            for (i, &k) in ks.iter().enumerate() {
                inc.set(k, i, 1.0);
            }
            let inc = g.constant(inc);
            let agg = g.matmul(inc, gated)?;
            total = Some(match total {
                None => agg,
                Some(t) => g.add(t, agg)?,
            });
        }
        Ok(g.relu(total.expect("self loops always exist")))
    }
}
