//! Syntax-driven argument pruning: k-order traversal, the distance-tuple
//! rule, and constituent boundaries.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ConstTree, DepTree, Sentence};
use crate::treeops::{children_map, k_order_descendants_in, lca_distances, DistanceTuple};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_TOP_K: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PruneError {
    #[error("predicate {p} outside [1, {n}]")]
    InvalidPredicate { p: usize, n: usize },
    #[error("pruning order must be at least 1")]
    ZeroOrder,
    #[error("distance-tuple table keeps no tuples")]
    EmptyTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HardPruneOptions {
    /// Treat ROOT like every other node on the path and collect its k-order
    /// descendants too.
    #[serde(default)]
    pub include_root_children: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardPrune {
    /// Token candidates in collection order.
    pub candidates: Vec<usize>,
    pub reached_root: bool,
}

pub fn hard_prune_candidates(tree: &DepTree, p: usize, k: usize) -> Result<HardPrune, PruneError> {
    hard_prune_with(tree, p, k, HardPruneOptions::default())
}

/// k-order traversal: walk from `p` up to ROOT, collecting each visited
/// node's descendants up to distance `k`.
pub fn hard_prune_with(tree: &DepTree, p: usize, k: usize, opts: HardPruneOptions) -> Result<HardPrune, PruneError> {
    if p < 1 || p > tree.len() {
        return Err(PruneError::InvalidPredicate { p, n: tree.len() });
    }
    if k == 0 {
        return Err(PruneError::ZeroOrder);
    }
    let children = children_map(tree);
    let mut seen = vec![false; tree.len() + 1];
    let mut candidates = Vec::new();
    let mut collect = |c: usize, candidates: &mut Vec<usize>| {
        for d in k_order_descendants_in(&children, c, k) {
            if !seen[d] {
                seen[d] = true;
                candidates.push(d);
            }
        }
    };
    let mut c = p;
    while c != 0 {
        collect(c, &mut candidates);
        c = tree.head(c);
    }
    if opts.include_root_children {
        collect(0, &mut candidates);
    }
    Ok(HardPrune {
        candidates,
        reached_root: true,
    })
}

/// Distance tuples with counts, most frequent first; only the first
/// `top_k` entries take part in pruning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceTupleTable {
    entries: Vec<(DistanceTuple, usize)>,
    top_k: usize,
    /// Sentences skipped for lacking a dependency tree.
    #[serde(default)]
    pub skipped: usize,
}

impl DistanceTupleTable {
    pub fn from_counts(counts: HashMap<DistanceTuple, usize>, top_k: usize) -> Self {
        let mut entries: Vec<_> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        DistanceTupleTable {
            entries,
            top_k,
            skipped: 0,
        }
    }

    pub fn entries(&self) -> &[(DistanceTuple, usize)] {
        &self.entries
    }

    pub fn retained(&self) -> &[(DistanceTuple, usize)] {
        &self.entries[..self.top_k.min(self.entries.len())]
    }

    pub fn contains(&self, t: DistanceTuple) -> bool {
        self.retained().iter().any(|&(x, _)| x == t)
    }

    pub fn with_top_k(&self, top_k: usize) -> Self {
        DistanceTupleTable { top_k, ..self.clone() }
    }
}

/// Counts `(d_p, d_a)` over every gold dependency argument.
pub fn build_syntactic_rule(train: &[Sentence], top_k: usize) -> DistanceTupleTable {
    let mut counts = HashMap::new();
    let mut skipped = 0;
    for s in train {
        let Some(tree) = &s.dep else {
            skipped += 1;
            continue;
        };
        for f in &s.frames {
            for a in f.dep_args() {
                *counts.entry(lca_distances(tree, f.predicate, a.index)).or_insert(0) += 1;
            }
        }
    }
    let mut t = DistanceTupleTable::from_counts(counts, top_k);
    t.skipped = skipped;
    t
}

/// `mask[a - 1]` is true when token `a` keeps a retained distance tuple to `p`.
pub fn soft_prune_mask(tree: &DepTree, p: usize, table: &DistanceTupleTable) -> Result<Vec<bool>, PruneError> {
    if table.retained().is_empty() {
        return Err(PruneError::EmptyTable);
    }
    if p < 1 || p > tree.len() {
        return Err(PruneError::InvalidPredicate { p, n: tree.len() });
    }
    Ok((1..=tree.len())
        .map(|a| a == p || table.contains(lca_distances(tree, p, a)))
        .collect())
}

pub type BoundarySet = HashSet<(usize, usize)>;

pub fn boundary_set(ct: &ConstTree) -> BoundarySet {
    ct.brackets().iter().map(|b| (b.start, b.end)).collect()
}

pub fn constituent_prune(candidates: &[(usize, usize)], bs: &BoundarySet) -> Vec<(usize, usize)> {
    candidates.iter().copied().filter(|c| bs.contains(c)).collect()
}

/// All spans of width at most `max_len`, by width and then start.
pub fn enumerate_spans(n: usize, max_len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for w in 1..=max_len.min(n) {
        for s in 1..=n + 1 - w {
            out.push((s, s + w - 1));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruneStat {
    pub k: usize,
    /// Fraction of gold arguments among the candidates.
    pub coverage: f64,
    /// Fraction of tokens pruned away, over all predicates.
    pub reduction: f64,
}

pub fn prune_statistics(
    corpus: &[Sentence],
    ks: impl IntoIterator<Item = usize>,
    opts: HardPruneOptions,
) -> Result<Vec<PruneStat>, PruneError> {
    let mut out = Vec::new();
    for k in ks {
        let (mut gold, mut kept, mut tokens, mut cands) = (0usize, 0usize, 0usize, 0usize);
        for s in corpus {
            let Some(tree) = &s.dep else { continue };
            for f in &s.frames {
                let hp = hard_prune_with(tree, f.predicate, k, opts)?;
                let set: BTreeSet<usize> = hp.candidates.iter().copied().collect();
                gold += f.dep_args().len();
                kept += f.dep_args().iter().filter(|a| set.contains(&a.index)).count();
                tokens += tree.len();
                cands += set.len();
            }
        }
        let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
        out.push(PruneStat {
            k,
            coverage: ratio(kept, gold),
            reduction: 1.0 - ratio(cands, tokens),
        });
    }
    Ok(out)
}

pub fn statistics_csv(stats: &[PruneStat]) -> String {
    let mut s = String::from("k,coverage,reduction\n");
    for st in stats {
        s.push_str(&format!("{},{:.6},{:.6}\n", st.k, st.coverage, st.reduction));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Bracket, Frame, Token};

    fn example() -> DepTree {
        DepTree::unlabeled(vec![2, 0, 2, 5, 3], "x").unwrap()
    }

    #[test]
    fn traversal_traces() {
        assert_eq!(
            hard_prune_candidates(&example(), 5, 1).unwrap().candidates,
            [4, 5, 1, 3]
        );
        assert_eq!(
            hard_prune_candidates(&example(), 5, 3).unwrap().candidates,
            [4, 5, 1, 3]
        );
        let chain = DepTree::unlabeled(vec![0, 1, 2], "x").unwrap();
        let hp = hard_prune_candidates(&chain, 1, 1).unwrap();
        assert_eq!(hp.candidates, [2]);
        assert!(hp.reached_root);
        assert_eq!(
            hard_prune_candidates(&chain, 4, 1),
            Err(PruneError::InvalidPredicate { p: 4, n: 3 })
        );
    }

    #[test]
    fn root_children_flag() {
        let opts = HardPruneOptions {
            include_root_children: true,
        };
        assert_eq!(
            hard_prune_with(&example(), 5, 1, opts).unwrap().candidates,
            [4, 5, 1, 3, 2]
        );
    }

    #[test]
    fn child_rule_masks_children() {
        let mut counts = HashMap::new();
        counts.insert(DistanceTuple::new(0, 1), 3);
        let table = DistanceTupleTable::from_counts(counts, 20);
        assert_eq!(
            soft_prune_mask(&example(), 2, &table).unwrap(),
            [true, true, true, false, false]
        );
        assert_eq!(
            soft_prune_mask(&example(), 2, &table.with_top_k(0)),
            Err(PruneError::EmptyTable)
        );
    }

    #[test]
    fn rule_ties_are_lexicographic() {
        let mut counts = HashMap::new();
        counts.insert(DistanceTuple::new(1, 2), 2);
        counts.insert(DistanceTuple::new(0, 1), 2);
        counts.insert(DistanceTuple::new(0, 2), 5);
        let t = DistanceTupleTable::from_counts(counts, 2);
        let order: Vec<_> = t.entries().iter().map(|e| e.0).collect();
        assert_eq!(
            order,
            [
                DistanceTuple::new(0, 2),
                DistanceTuple::new(0, 1),
                DistanceTuple::new(1, 2)
            ]
        );
        assert_eq!(t.retained().len(), 2);
    }

    #[test]
    fn constituent_filter() {
        let ct = ConstTree::new(
            vec![
                Bracket::new(1, 3, "S"),
                Bracket::new(1, 1, "NP"),
                Bracket::new(2, 3, "VP"),
            ],
            3,
        )
        .unwrap();
        let bs = boundary_set(&ct);
        assert_eq!(
            constituent_prune(&enumerate_spans(3, 30), &bs),
            [(1, 1), (2, 3), (1, 3)]
        );
        let only: BoundarySet = [(1, 2)].into_iter().collect();
        assert_eq!(constituent_prune(&[(1, 2), (2, 3)], &only), [(1, 2)]);
    }

    #[test]
    fn statistics_on_single_sentence() {
        let mut s = Sentence::new((0..5).map(|i| Token::new(&format!("w{}", i), "w", "X")).collect());
        s.dep = Some(example());
        s.frames = vec![Frame::dep(5, "", vec![(4, "A0"), (2, "A1")])];
        let st = prune_statistics(&[s], 1..=1, HardPruneOptions::default()).unwrap();
        assert_eq!(st[0].coverage, 0.5);
        assert!((st[0].reduction - 0.2).abs() < 1e-12);
        assert!(statistics_csv(&st).starts_with("k,coverage,reduction\n1,"));
    }
}
