//! Structural queries on dependency trees and the constituency-to-node-tree
//! conversion used to feed constituents through dependency encoders.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::corpus::{Bracket, ConstTree, DepTree};
use crate::numcore::Tensor;

/// Children of every node `0..=n` (0 = ROOT), each list ascending.
pub fn children_map(tree: &DepTree) -> Vec<Vec<usize>> {
    let mut ch = vec![Vec::new(); tree.len() + 1];
    for (i, &h) in tree.heads().iter().enumerate() {
        ch[h].push(i + 1);
    }
    ch
}

/// Nodes strictly below `node` at distance at most `k`, ascending.
pub fn k_order_descendants(tree: &DepTree, node: usize, k: usize) -> Vec<usize> {
    k_order_descendants_in(&children_map(tree), node, k)
}

pub(crate) fn k_order_descendants_in(children: &[Vec<usize>], node: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(node, 0usize)]);
    while let Some((c, d)) = queue.pop_front() {
        if d == k {
            continue;
        }
        for &x in &children[c] {
            out.push(x);
            queue.push_back((x, d + 1));
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DistanceTuple {
    pub d_p: usize,
    pub d_a: usize,
}

impl DistanceTuple {
    pub fn new(d_p: usize, d_a: usize) -> Self {
        DistanceTuple { d_p, d_a }
    }
}

/// Distances from `p` and `a` up to their nearest common ancestor.
pub fn lca_distances(tree: &DepTree, p: usize, a: usize) -> DistanceTuple {
    let pp = tree.path_to_root(p);
    let pa = tree.path_to_root(a);
    for (d_p, node) in pp.iter().enumerate() {
        if let Some(d_a) = pa.iter().position(|x| x == node) {
            return DistanceTuple::new(d_p, d_a);
        }
    }
    unreachable!("every path ends at ROOT")
}

/// Which side of a constituent a token sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    None = 0,
    Start = 1,
    End = 2,
    Both = 3,
}

impl BoundaryTag {
    pub const COUNT: usize = 4;

    pub fn id(self) -> usize {
        self as usize
    }

    fn with(self, other: BoundaryTag) -> BoundaryTag {
        match (self, other) {
            (BoundaryTag::None, t) | (t, BoundaryTag::None) => t,
            (a, b) if a == b => a,
            _ => BoundaryTag::Both,
        }
    }
}

/// Constituency tree with terminals removed: one node per bracket.
///
/// Nodes are ordered by start ascending, then end descending, so the root
/// comes first and every parent precedes its children. Brackets with the
/// same span form a chain in their original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvertedTree {
    pub nodes: Vec<Bracket>,
    pub parent: Vec<Option<usize>>,
    n: usize,
}

impl ConvertedTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sentence_len(&self) -> usize {
        self.n
    }

    pub fn arc_label(&self, node: usize) -> &str {
        &self.nodes[node].label
    }

    /// The node structure as a dependency tree over nodes `1..=len`, with
    /// each node's label on its incoming arc.
    pub fn as_dep_tree(&self) -> DepTree {
        let heads = self.parent.iter().map(|p| p.map_or(0, |p| p + 1)).collect();
        let rels = self.nodes.iter().map(|b| b.label.clone()).collect();
        DepTree::new(heads, rels).expect("parents precede children")
    }

    /// `n x len` matrix: entry `(t, j)` counts how often node `j` passes its
    /// vector to token `t + 1` (once per boundary, twice for width-1 nodes).
    pub fn decomposition_matrix(&self) -> Tensor {
        let mut m = Tensor::zeros(&[self.n, self.len()]);
        for (j, b) in self.nodes.iter().enumerate() {
            let s = m.get(b.start - 1, j);
            m.set(b.start - 1, j, s + 1.0);
            let e = m.get(b.end - 1, j);
            m.set(b.end - 1, j, e + 1.0);
        }
        m
    }

    /// Boundary tag per token.
    pub fn boundary_tags(&self) -> Vec<BoundaryTag> {
        let mut tags = vec![BoundaryTag::None; self.n];
        for b in &self.nodes {
            tags[b.start - 1] = tags[b.start - 1].with(BoundaryTag::Start);
            tags[b.end - 1] = tags[b.end - 1].with(BoundaryTag::End);
        }
        tags
    }
}

pub fn convert_constituency(ct: &ConstTree) -> ConvertedTree {
    let mut nodes: Vec<Bracket> = ct.brackets().to_vec();
    nodes.sort_by(|a, b| a.start.cmp(&b.start).then(b.end.cmp(&a.end)));
    let mut parent = vec![None; nodes.len()];
    for i in 1..nodes.len() {
        parent[i] = (0..i).rev().find(|&j| nodes[j].contains(&nodes[i]));
    }
    ConvertedTree {
        nodes,
        parent,
        n: ct.len(),
    }
}

/// Sums node vectors onto the first and last token of each node's span.
pub fn decompose_features(conv: &ConvertedTree, node_vectors: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<BoundaryTag>) {
    let dim = node_vectors.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; dim]; conv.n];
    for (b, v) in conv.nodes.iter().zip(node_vectors) {
        for t in [b.start, b.end] {
            for (o, x) in out[t - 1].iter_mut().zip(v) {
                *o += x;
            }
        }
    }
    (out, conv.boundary_tags())
}

/// Which token to report when a span has several tokens headed outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadChoice {
    #[default]
    Leftmost,
    Rightmost,
}

pub fn find_span_head(tree: &DepTree, start: usize, end: usize) -> usize {
    find_span_head_with(tree, start, end, HeadChoice::Leftmost)
}

pub fn find_span_head_with(tree: &DepTree, start: usize, end: usize, choice: HeadChoice) -> usize {
    let outside = |i: &usize| {
        let h = tree.head(*i);
        h < start || h > end
    };
    let found = match choice {
        HeadChoice::Leftmost => (start..=end).find(outside),
        HeadChoice::Rightmost => (start..=end).rev().find(outside),
    };
    found.expect("a valid tree has an external head in every span")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> DepTree {
        DepTree::unlabeled(vec![2, 0, 2, 5, 3], "x").unwrap()
    }

    #[test]
    fn children() {
        let c = children_map(&DepTree::unlabeled(vec![2, 0, 2], "x").unwrap());
        assert_eq!(c, vec![vec![2], vec![], vec![1, 3], vec![]]);
    }

    #[test]
    fn descendants_by_order() {
        assert_eq!(k_order_descendants(&example(), 2, 1), [1, 3]);
        assert_eq!(k_order_descendants(&example(), 2, 2), [1, 3, 5]);
        assert!(k_order_descendants(&example(), 2, 0).is_empty());
    }

    #[test]
    fn lca_cases() {
        let t = example();
        assert_eq!(lca_distances(&t, 3, 5), DistanceTuple::new(0, 1));
        assert_eq!(lca_distances(&t, 1, 5), DistanceTuple::new(1, 2));
        assert_eq!(lca_distances(&t, 4, 4), DistanceTuple::new(0, 0));
        assert_eq!(lca_distances(&t, 4, 3), DistanceTuple::new(2, 0));
    }

    #[test]
    fn conversion() {
        let ct = ConstTree::new(
            vec![
                Bracket::new(1, 1, "NP"),
                Bracket::new(1, 3, "S"),
                Bracket::new(2, 3, "VP"),
            ],
            3,
        )
        .unwrap();
        let c = convert_constituency(&ct);
        assert_eq!(c.nodes[0], Bracket::new(1, 3, "S"));
        assert_eq!(c.parent, vec![None, Some(0), Some(0)]);
        assert_eq!(c.as_dep_tree().heads(), &[0, 1, 1]);
    }

    #[test]
    fn decomposition() {
        let ct = ConstTree::new(vec![Bracket::new(1, 3, "S"), Bracket::new(2, 2, "V")], 3).unwrap();
        let c = convert_constituency(&ct);
        let (v, tags) = decompose_features(&c, &[vec![1.0], vec![10.0]]);
        assert_eq!(v, vec![vec![1.0], vec![20.0], vec![1.0]]);
        assert_eq!(tags, [BoundaryTag::Start, BoundaryTag::Both, BoundaryTag::End]);
    }

    #[test]
    fn span_heads() {
        let t = example();
        assert_eq!(find_span_head(&t, 3, 3), 3);
        assert_eq!(find_span_head(&t, 3, 5), 3);
        assert_eq!(find_span_head(&t, 1, 5), 2);
        assert_eq!(find_span_head_with(&t, 1, 1, HeadChoice::Rightmost), 1);
    }
}
