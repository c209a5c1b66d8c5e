//! Semantic P/R/F1, LAS, labeled bracket F1, and their ratio.

use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ConstTree, DepArg, DepTree, Frame, Sentence};
use crate::treeops::{find_span_head_with, HeadChoice};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("{gold} gold sentences but {pred} predicted")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {index}: {gold} gold tokens but {pred} predicted")]
    TokenCount { index: usize, gold: usize, pred: usize },
    #[error("sentence {0} has no gold dependency tree")]
    MissingTree(usize),
    #[error("syntax score is zero")]
    ZeroSyntax,
}

/// Half-up rounding to two decimals.
pub fn round2(x: f64) -> f64 {
    ((x * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub syntax_score: Option<f64>,
    pub ratio: Option<f64>,
}

impl EvalReport {
    /// Attaches a syntax score and the semantic/syntax ratio.
    pub fn with_syntax(mut self, syntax_score: f64) -> Result<Self, EvalError> {
        self.ratio = Some(ratio(self.f1, syntax_score)?);
        self.syntax_score = Some(round2(syntax_score));
        Ok(self)
    }

    pub fn to_table(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{:.2}", v));
        format!(
            "{:<10} {:>8}\n{:<10} {:>8.2}\n{:<10} {:>8.2}\n{:<10} {:>8.2}\n{:<10} {:>8}\n{:<10} {:>8}\n",
            "metric",
            "value",
            "precision",
            self.precision,
            "recall",
            self.recall,
            "f1",
            self.f1,
            "syntax",
            opt(self.syntax_score),
            "ratio",
            opt(self.ratio)
        )
    }
}

/// Matched/predicted/gold tuple counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            correct: self.correct + o.correct,
            predicted: self.predicted + o.predicted,
            gold: self.gold + o.gold,
        }
    }

    fn of<T: Eq + Hash>(gold: Vec<T>, pred: Vec<T>) -> Counts {
        let mut bag: HashMap<T, usize> = HashMap::new();
        let n_gold = gold.len();
        for g in gold {
            *bag.entry(g).or_insert(0) += 1;
        }
        let n_pred = pred.len();
        let mut correct = 0;
        for p in pred {
            if let Some(c) = bag.get_mut(&p) {
                if *c > 0 {
                    *c -= 1;
                    correct += 1;
                }
            }
        }
        Counts {
            correct,
            predicted: n_pred,
            gold: n_gold,
        }
    }

    /// Percent scores; an empty prediction set has precision 0, and two
    /// empty sets score 100.
    pub fn report(&self) -> EvalReport {
        let (p, r) = if self.gold == 0 && self.predicted == 0 {
            (100.0, 100.0)
        } else {
            let div = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
            (div(self.correct, self.predicted), div(self.correct, self.gold))
        };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        EvalReport {
            precision: round2(p),
            recall: round2(r),
            f1: round2(f),
            syntax_score: None,
            ratio: None,
        }
    }
}

fn align(gold: &[Sentence], pred: &[Sentence]) -> Result<(), EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenCount {
                index: i,
                gold: g.len(),
                pred: p.len(),
            });
        }
    }
    Ok(())
}

#[derive(PartialEq, Eq, Hash)]
enum DepTuple<'a> {
    Arg(usize, usize, &'a str),
    Sense(usize, &'a str),
}

fn dep_tuples(frames: &[Frame], include_senses: bool) -> Vec<DepTuple<'_>> {
    let mut out = Vec::new();
    for f in frames {
        if include_senses {
            out.push(DepTuple::Sense(f.predicate, &f.sense));
        }
        for a in f.dep_args() {
            out.push(DepTuple::Arg(f.predicate, a.index, &a.role));
        }
    }
    out
}

pub fn dep_counts(gold: &[Sentence], pred: &[Sentence], include_senses: bool) -> Result<Counts, EvalError> {
    align(gold, pred)?;
    Ok(gold
        .par_iter()
        .zip(pred)
        .map(|(g, p)| {
            Counts::of(
                dep_tuples(&g.frames, include_senses),
                dep_tuples(&p.frames, include_senses),
            )
        })
        .reduce(Counts::default, Counts::merge))
}

/// Micro P/R/F1 over labeled (predicate, argument, role) tuples, plus one
/// (predicate, sense) tuple per frame when `include_senses` is set.
pub fn dep_srl_score(gold: &[Sentence], pred: &[Sentence], include_senses: bool) -> Result<EvalReport, EvalError> {
    Ok(dep_counts(gold, pred, include_senses)?.report())
}

fn span_tuples(frames: &[Frame]) -> Vec<(usize, usize, usize, &str)> {
    frames
        .iter()
        .flat_map(|f| {
            f.span_args()
                .iter()
                .map(move |a| (f.predicate, a.start, a.end, a.role.as_str()))
        })
        .collect()
}

pub fn span_counts(gold: &[Sentence], pred: &[Sentence]) -> Result<Counts, EvalError> {
    align(gold, pred)?;
    Ok(gold
        .par_iter()
        .zip(pred)
        .map(|(g, p)| Counts::of(span_tuples(&g.frames), span_tuples(&p.frames)))
        .reduce(Counts::default, Counts::merge))
}

/// Micro P/R/F1 over exact (predicate, start, end, role) matches.
pub fn span_srl_score(gold: &[Sentence], pred: &[Sentence]) -> Result<EvalReport, EvalError> {
    Ok(span_counts(gold, pred)?.report())
}

/// Labeled attachment score in percent.
pub fn las(gold: &[&DepTree], pred: &[&DepTree]) -> Result<f64, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let (mut ok, mut total) = (0usize, 0usize);
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenCount {
                index: i,
                gold: g.len(),
                pred: p.len(),
            });
        }
        total += g.len();
        ok += (1..=g.len())
            .filter(|&t| g.head(t) == p.head(t) && g.rel(t) == p.rel(t))
            .count();
    }
    Ok(if total == 0 {
        100.0
    } else {
        round2(100.0 * ok as f64 / total as f64)
    })
}

/// Labeled bracket P/R/F1.
pub fn const_f1(gold: &[&ConstTree], pred: &[&ConstTree]) -> Result<EvalReport, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut c = Counts::default();
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenCount {
                index: i,
                gold: g.len(),
                pred: p.len(),
            });
        }
        c = c.merge(Counts::of(g.brackets().to_vec(), p.brackets().to_vec()));
    }
    Ok(c.report())
}

/// `sem_f1 / syntax_score * 100`, rounded half-up to two decimals.
pub fn ratio(sem_f1: f64, syntax_score: f64) -> Result<f64, EvalError> {
    if syntax_score <= 0.0 {
        return Err(EvalError::ZeroSyntax);
    }
    Ok(round2(sem_f1 / syntax_score * 100.0))
}

/// Replaces every span argument by its syntactic head under `tree`.
pub fn spans_to_heads(frames: &[Frame], tree: &DepTree, choice: HeadChoice) -> Vec<Frame> {
    frames
        .iter()
        .map(|f| {
            let args = f
                .span_args()
                .iter()
                .map(|a| DepArg {
                    index: find_span_head_with(tree, a.start, a.end, choice),
                    role: a.role.clone(),
                })
                .collect();
            Frame {
                predicate: f.predicate,
                sense: f.sense.clone(),
                args: crate::corpus::Arguments::Dep(args),
            }
        })
        .collect()
}

/// Scores span predictions against dependency gold after head-finding on
/// the gold trees. Senses are not scored.
pub fn span_to_dep_eval(
    gold_dep: &[Sentence],
    span_pred: &[Sentence],
    choice: HeadChoice,
) -> Result<EvalReport, EvalError> {
    align(gold_dep, span_pred)?;
    let converted = gold_dep
        .iter()
        .zip(span_pred)
        .enumerate()
        .map(|(i, (g, p))| {
            let tree = g.dep.as_ref().ok_or(EvalError::MissingTree(i))?;
            let mut s = p.clone();
            s.frames = spans_to_heads(&p.frames, tree, choice);
            Ok(s)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    dep_srl_score(gold_dep, &converted, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Bracket, Token};

    fn sentence(n: usize, frames: Vec<Frame>) -> Sentence {
        let mut s = Sentence::new((0..n).map(|i| Token::new(&format!("w{}", i), "w", "X")).collect());
        s.frames = frames;
        s
    }

    #[test]
    fn ratio_values() {
        assert_eq!(ratio(89.5, 86.0).unwrap(), 104.07);
        assert_eq!(ratio(90.3, 100.0).unwrap(), 90.30);
        assert_eq!(ratio(84.8, 93.8).unwrap(), 90.41);
        assert_eq!(ratio(1.0, 0.0), Err(EvalError::ZeroSyntax));
    }

    #[test]
    fn half_correct_dep() {
        let g = sentence(4, vec![Frame::dep(2, "x.01", vec![(1, "A0"), (3, "A1")])]);
        let p = sentence(4, vec![Frame::dep(2, "x.02", vec![(1, "A0"), (4, "A1")])]);
        let r = dep_srl_score(&[g], &[p], false).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (50.0, 50.0, 50.0));
    }

    #[test]
    fn empty_prediction() {
        let g = sentence(4, vec![Frame::dep(2, "", vec![(1, "A0")])]);
        let r = dep_srl_score(&[g], &[sentence(4, vec![])], true).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn off_by_one_span() {
        let g = sentence(4, vec![Frame::span(1, "", vec![(2, 3, "A0"), (4, 4, "A1")])]);
        let p = sentence(4, vec![Frame::span(1, "", vec![(2, 4, "A0"), (4, 4, "A1")])]);
        let r = span_srl_score(&[g], &[p]).unwrap();
        assert_eq!(r.f1, 50.0);
    }

    #[test]
    fn las_and_brackets() {
        let a = DepTree::unlabeled(vec![2, 0], "x").unwrap();
        let b = DepTree::unlabeled(vec![0, 1], "x").unwrap();
        let c = DepTree::new(vec![2, 0], vec!["x".into(), "y".into()]).unwrap();
        assert_eq!(las(&[&a], &[&a]).unwrap(), 100.0);
        assert_eq!(las(&[&a], &[&b]).unwrap(), 0.0);
        assert_eq!(las(&[&a], &[&c]).unwrap(), 50.0);
        let g = ConstTree::new(
            vec![
                Bracket::new(1, 4, "S"),
                Bracket::new(1, 2, "NP"),
                Bracket::new(3, 4, "VP"),
            ],
            4,
        )
        .unwrap();
        let p = ConstTree::new(vec![Bracket::new(1, 4, "S"), Bracket::new(2, 4, "VP")], 4).unwrap();
        let r = const_f1(&[&g], &[&p]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (50.0, 33.33, 40.0));
    }

    #[test]
    fn report_with_syntax() {
        let r = Counts {
            correct: 1,
            predicted: 1,
            gold: 1,
        }
        .report()
        .with_syntax(50.0)
        .unwrap();
        assert_eq!(r.ratio, Some(200.0));
        assert!(r.to_table().contains("200.00"));
    }
}
