mod common;

use std::collections::BTreeSet;

use common::{arb_tree, brute_hard_prune};
use proptest::prelude::*;
use srllab::corpus::{
    bio_to_spans, parse_conll09, read_jsonl, spans_to_bio, validate_heads, write_conll09, write_jsonl, Arguments,
    Bracket, ConstTree, DepTree, Frame, Sentence, SpanArg, Token,
};
use srllab::eval::{dep_srl_score, span_srl_score};
use srllab::pruning::{hard_prune_candidates, hard_prune_with, HardPruneOptions};
use srllab::stg::{corrupt_tree, CorruptionConfig};
use srllab::treeops::{convert_constituency, decompose_features, k_order_descendants, lca_distances};

const ROLES: [&str; 4] = ["A0", "A1", "A2", "AM-TMP"];

/// Sorted, non-overlapping spans over `1..=n` from cut points.
fn arb_spans(n: usize) -> impl Strategy<Value = Vec<SpanArg>> {
    proptest::collection::vec((any::<bool>(), 0..ROLES.len()), n).prop_map(move |marks| {
        let mut out: Vec<SpanArg> = Vec::new();
        let mut i = 1;
        while i <= n {
            let (open, r) = marks[i - 1];
            if open {
                let w = 1 + (r + i) % 3;
                let end = (i + w - 1).min(n);
                out.push(SpanArg::new(i, end, ROLES[r]));
                i = end + 1;
            } else {
                i += 1;
            }
        }
        out
    })
}

fn word() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-z0-9.\\-]{0,5}"
}

fn arb_dep_sentence(max_n: usize) -> impl Strategy<Value = Sentence> {
    arb_tree(max_n).prop_flat_map(|tree| {
        let n = tree.len();
        (
            Just(tree),
            proptest::collection::vec((word(), word(), "[A-Z]{2,3}"), n),
            proptest::collection::vec(("[A-Z]{3,5}", proptest::option::of(word())), n),
            proptest::collection::vec(proptest::collection::vec(0..4usize, n), n),
        )
            .prop_map(|(tree, toks, preds, roles)| {
                let mut s = Sentence::new(toks.iter().map(|(f, l, p)| Token::new(f, l, p)).collect());
                let rels = preds.iter().map(|(r, _)| r.clone()).collect();
                s.dep = Some(DepTree::new(tree.heads().to_vec(), rels).unwrap());
                s.frames = preds
                    .iter()
                    .enumerate()
                    .filter_map(|(i, (_, sense))| sense.as_ref().map(|se| (i + 1, se.clone())))
                    .map(|(p, sense)| {
                        let args = roles[p - 1]
                            .iter()
                            .enumerate()
                            .filter(|&(_, &r)| r < 3)
                            .map(|(a, &r)| (a + 1, ROLES[r]))
                            .collect();
                        Frame::dep(p, &sense, args)
                    })
                    .collect();
                s
            })
    })
}

fn arb_span_sentence(max_n: usize) -> impl Strategy<Value = Sentence> {
    (1..=max_n).prop_flat_map(|n| {
        (
            proptest::collection::vec(word(), n),
            proptest::collection::vec((0..n, arb_spans(n)), 0..3),
            proptest::option::of(proptest::collection::vec(
                proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3),
                n,
            )),
        )
            .prop_map(move |(forms, frames, ext)| {
                let mut s = Sentence::new(forms.iter().map(|f| Token::new(f, f, "NN")).collect());
                let mut seen = BTreeSet::new();
                for (p, spans) in frames {
                    if seen.insert(p) {
                        s.frames.push(Frame::span(
                            p + 1,
                            "",
                            spans.iter().map(|a| (a.start, a.end, a.role.as_str())).collect(),
                        ));
                    }
                }
                let brackets = vec![Bracket::new(1, n, "S")];
                s.consts = Some(ConstTree::new(brackets, n).unwrap());
                s.ext_vectors = ext;
                s
            })
    })
}

/// `g` carrying the frames of `other` that fit inside it.
fn relabel(g: &Sentence, other: &Sentence) -> Sentence {
    let n = g.len();
    let mut s = g.clone();
    s.frames = other
        .frames
        .iter()
        .filter(|f| f.predicate <= n)
        .map(|f| {
            let mut f = f.clone();
            match &mut f.args {
                Arguments::Dep(a) => a.retain(|x| x.index <= n),
                Arguments::Span(a) => a.retain(|x| x.end <= n),
            }
            f
        })
        .collect();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bio_roundtrip((n, spans) in (1..15usize).prop_flat_map(|n| (Just(n), arb_spans(n)))) {
        let frame = Frame::span(1, "", spans.iter().map(|a| (a.start, a.end, a.role.as_str())).collect());
        let tags = spans_to_bio(&frame, n).unwrap();
        prop_assert_eq!(tags.len(), n);
        prop_assert_eq!(bio_to_spans(&tags), spans);
    }

    #[test]
    fn hard_prune_matches_definition(tree in arb_tree(8), p in 1..=8usize, k in 1..=3usize, root_too: bool) {
        let p = 1 + (p - 1) % tree.len();
        let opts = HardPruneOptions { include_root_children: root_too };
        let got = hard_prune_with(&tree, p, k, opts).unwrap().candidates;
        let set: BTreeSet<usize> = got.iter().copied().collect();
        prop_assert_eq!(set.len(), got.len());
        prop_assert_eq!(set, brute_hard_prune(&tree, p, k, root_too));
    }

    #[test]
    fn hard_prune_grows_with_k(tree in arb_tree(10), p in 1..=10usize, k in 1..=9usize) {
        let p = 1 + (p - 1) % tree.len();
        let small: BTreeSet<usize> = hard_prune_candidates(&tree, p, k).unwrap().candidates.into_iter().collect();
        let big: BTreeSet<usize> = hard_prune_candidates(&tree, p, k + 1).unwrap().candidates.into_iter().collect();
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn stg_output_is_a_tree(tree in arb_tree(12), p in 0.0..=1.0f64, seed: u64) {
        let c = corrupt_tree(&tree, &CorruptionConfig::new(p, seed).unwrap());
        prop_assert!(validate_heads(c.heads()).is_ok());
        prop_assert!(c.is_single_rooted());
        prop_assert_eq!(c.rels(), tree.rels());
        prop_assert_eq!(corrupt_tree(&tree, &CorruptionConfig::new(0.0, seed).unwrap()), tree);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn k_order_matches_depth_difference(tree in arb_tree(12), node in 0..=12usize, k in 1..=5usize) {
        let node = node % (tree.len() + 1);
        let brute: Vec<usize> = (1..=tree.len())
            .filter(|&a| tree.path_to_root(a).iter().position(|&x| x == node).is_some_and(|d| d >= 1 && d <= k))
            .collect();
        prop_assert_eq!(k_order_descendants(&tree, node, k), brute);
    }

    #[test]
    fn lca_is_symmetric(tree in arb_tree(12), a in 1..=12usize, b in 1..=12usize) {
        let (a, b) = (1 + (a - 1) % tree.len(), 1 + (b - 1) % tree.len());
        let x = lca_distances(&tree, a, b);
        let y = lca_distances(&tree, b, a);
        prop_assert_eq!((x.d_p, x.d_a), (y.d_a, y.d_p));
        prop_assert_eq!(x.d_p == 0, tree.path_to_root(b).contains(&a));
        let (pa, pb) = (tree.path_to_root(a), tree.path_to_root(b));
        prop_assert_eq!(pa[x.d_p], pb[x.d_a]);
    }

    #[test]
    fn decomposition_keeps_mass(n in 1..12usize, cuts in proptest::collection::vec((0..12usize, 0..12usize), 0..8)) {
        let mut brackets = vec![Bracket::new(1, n, "S")];
        for (a, b) in cuts {
            let (s, e) = (1 + a % n, 1 + b % n);
            let new = Bracket::new(s.min(e), s.max(e), "X");
            if brackets.iter().all(|x| x.contains(&new) || new.contains(x) || x.end < new.start || new.end < x.start) {
                brackets.push(new);
            }
        }
        let conv = convert_constituency(&ConstTree::new(brackets, n).unwrap());
        let vecs: Vec<Vec<f64>> = (0..conv.len()).map(|j| vec![1.0, j as f64]).collect();
        let (out, tags) = decompose_features(&conv, &vecs);
        prop_assert_eq!(tags.len(), n);
        let total: f64 = out.iter().map(|v| v[0]).sum();
        prop_assert_eq!(total, 2.0 * conv.len() as f64);
        let weighted: f64 = out.iter().map(|v| v[1]).sum();
        prop_assert_eq!(weighted, 2.0 * vecs.iter().map(|v| v[1]).sum::<f64>());
    }

    #[test]
    fn dep_f1_is_symmetric(g in arb_dep_sentence(8), other in arb_dep_sentence(8), senses: bool) {
        let p = relabel(&g, &other);
        let a = dep_srl_score(std::slice::from_ref(&g), std::slice::from_ref(&p), senses).unwrap();
        let b = dep_srl_score(&[p], &[g], senses).unwrap();
        prop_assert_eq!((a.precision, a.recall, a.f1), (b.recall, b.precision, b.f1));
    }

    #[test]
    fn span_f1_is_symmetric(g in arb_span_sentence(8), other in arb_span_sentence(8)) {
        let p = relabel(&g, &other);
        let a = span_srl_score(std::slice::from_ref(&g), std::slice::from_ref(&p)).unwrap();
        let b = span_srl_score(&[p], &[g]).unwrap();
        prop_assert_eq!((a.precision, a.recall, a.f1), (b.recall, b.precision, b.f1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn jsonl_roundtrip(dep in proptest::collection::vec(arb_dep_sentence(10), 0..4),
                       span in proptest::collection::vec(arb_span_sentence(10), 0..4)) {
        let all: Vec<Sentence> = dep.into_iter().chain(span).collect();
        let text = write_jsonl(&all).unwrap();
        prop_assert_eq!(read_jsonl(&text).unwrap(), all);
    }

    #[test]
    fn conll_roundtrip(corpus in proptest::collection::vec(arb_dep_sentence(10), 1..4)) {
        let text = write_conll09(&corpus).unwrap();
        let back = parse_conll09(&text).unwrap();
        prop_assert_eq!(write_conll09(&back).unwrap(), text);
        for (a, b) in corpus.iter().zip(&back) {
            prop_assert_eq!(&a.tokens, &b.tokens);
            prop_assert_eq!(&a.dep, &b.dep);
            prop_assert_eq!(&a.frames, &b.frames);
        }
    }
}
