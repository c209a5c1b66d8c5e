use crate::corpus::{Arguments, DepArg, Frame, Style, Vocabularies};
use crate::layers::{AffineHeads, Biaffine, ParamBuilder};
use crate::numcore::{Axis, Graph, ParamId, Tensor, Var};

use super::config::ModelConfig;
use super::encoder::SentenceEncoder;
use super::labels::{sense_label, sense_string, Labels, NULL};
use super::{argmax_in, Ctx, DecisionScore, Decisions, ModelError, Prediction, Prepared};

/// Predicate-argument structure as a one-level tree under ROOT: every
/// token is scored against the predicate, the predicate against ROOT.
#[derive(Debug, Clone)]
pub struct TreeNet {
    pub enc: SentenceEncoder,
    pub root: ParamId,
    pub heads: AffineHeads,
    pub biaffine: Biaffine,
}

struct Heads {
    pred: Var,
    arg: Var,
    n: usize,
}

impl TreeNet {
    pub fn new(
        p: &mut ParamBuilder,
        cfg: &ModelConfig,
        vocabs: &Vocabularies,
        labels: &Labels,
        pretrained: Option<Tensor>,
    ) -> Result<Self, ModelError> {
        if cfg.style != Style::Dep {
            return Err(ModelError::Config(
                "the tree factorization labels dependency arguments".into(),
            ));
        }
        let enc = SentenceEncoder::new(p, cfg, vocabs, pretrained)?;
        let d = enc.out_dim();
        Ok(TreeNet {
            root: p.matrix("root", 1, d)?,
            heads: AffineHeads::new(&mut p.sub("heads"), d, cfg.head_dim)?,
            biaffine: Biaffine::new(&mut p.sub("biaffine"), cfg.head_dim, cfg.head_dim, labels.tree.len())?,
            enc,
        })
    }

    fn heads(
        &self,
        g: &mut Graph,
        ctx: &Ctx,
        prep: &Prepared,
        lexical: Option<Var>,
        flags: &[usize],
    ) -> Result<Heads, ModelError> {
        let states = self.enc.encode(g, lexical, flags, prep.syntax.as_ref(), ctx.vocabs)?;
        let r = g.param(self.root);
        let x = g.concat(&[r, states], Axis::Rows)?;
        let (pred, arg) = self.heads.forward(g, x)?;
        Ok(Heads {
            pred,
            arg,
            n: flags.len(),
        })
    }

    /// n x |labels|: every token as the argument of node `head` (0 = ROOT).
    fn score_tokens(&self, g: &mut Graph, h: &Heads, head: usize) -> Result<Var, ModelError> {
        let args = g.slice(h.arg, Axis::Rows, 1, h.n)?;
        let pred = g.row(h.pred, head)?;
        Ok(self.biaffine.score(g, args, pred)?)
    }

    /// 1 x |labels|: predicate `p` under ROOT.
    fn score_root(&self, g: &mut Graph, h: &Heads, p: usize) -> Result<Var, ModelError> {
        let arg = g.row(h.arg, p)?;
        let root = g.row(h.pred, 0)?;
        Ok(self.biaffine.score(g, arg, root)?)
    }

    pub(crate) fn loss(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Option<Var>, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let mut dec = Decisions::default();
        let sense_id = |sense: &str| ctx.labels.tree.id(sense_label(sense)).unwrap_or(NULL);
        for f in &s.frames {
            let p = f.predicate;
            let flags: Vec<usize> = (1..=n).map(|i| usize::from(i == p)).collect();
            let h = self.heads(g, ctx, prep, lexical, &flags)?;
            let scores = self.score_tokens(g, &h, p)?;
            let mut gold = vec![NULL; n];
            for a in f.dep_args() {
                gold[a.index - 1] = ctx.labels.tree.id(&a.role).unwrap_or(NULL);
            }
            let rows: Vec<usize> = match ctx.prune_mask(s, p)? {
                Some(m) => (0..n).filter(|&i| m[i]).collect(),
                None => (0..n).collect(),
            };
            let kept = if rows.len() < n {
                g.gather(scores, &rows)?
            } else {
                scores
            };
            let targets: Vec<usize> = rows.iter().map(|&i| gold[i]).collect();
            dec.push(g, kept, &targets)?;
            if ctx.cfg.given_predicates {
                let root = self.score_root(g, &h, p)?;
                dec.push(g, root, &[sense_id(&f.sense)])?;
            }
        }
        if !ctx.cfg.given_predicates {
            let h = self.heads(g, ctx, prep, lexical, &vec![0; n])?;
            let scores = self.score_tokens(g, &h, 0)?;
            let mut targets = vec![NULL; n];
            for f in &s.frames {
                targets[f.predicate - 1] = sense_id(&f.sense);
            }
            dec.push(g, scores, &targets)?;
        }
        dec.finish(g)
    }

    pub(crate) fn predict(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Prediction, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let n_roles = ctx.labels.roles.len();
        let n_labels = ctx.labels.tree.len();
        let mut out = Prediction::default();
        // (predicate, sense) decisions
        let mut preds: Vec<(usize, Option<(String, f64)>)> = Vec::new();
        if ctx.cfg.given_predicates {
            preds.extend(prep.predicates.iter().map(|&p| (p, None)));
        } else {
            let h = self.heads(g, ctx, prep, lexical, &vec![0; n])?;
            let scores = self.score_tokens(g, &h, 0)?;
            let t = g.value(scores);
            for i in 0..n {
                let row = t.row_slice(i);
                let k = argmax_in(row, 0..n_labels);
                if k >= n_roles {
                    preds.push((i + 1, Some((sense_string(ctx.labels.tree.name(k)), row[k]))));
                }
            }
        }
        for (p, sense) in preds {
            let flags: Vec<usize> = (1..=n).map(|i| usize::from(i == p)).collect();
            let h = self.heads(g, ctx, prep, lexical, &flags)?;
            let (sense, sense_score) = match sense {
                Some(x) => x,
                None => {
                    let root = self.score_root(g, &h, p)?;
                    let row = g.value(root).row_slice(0);
                    let k = argmax_in(row, n_roles..n_labels);
                    (sense_string(ctx.labels.tree.name(k)), row[k])
                }
            };
            out.scores.push(DecisionScore {
                predicate: p,
                start: 0,
                end: 0,
                label: sense.clone(),
                score: sense_score,
            });
            let mask = ctx.prune_mask(s, p)?;
            let scores = self.score_tokens(g, &h, p)?;
            let t = g.value(scores);
            let mut args = Vec::new();
            for i in 0..n {
                if mask.as_ref().is_some_and(|m| !m[i]) {
                    continue;
                }
                let row = t.row_slice(i);
                let k = argmax_in(row, 0..n_roles);
                if k != NULL {
                    let role = ctx.labels.tree.name(k).to_string();
                    out.scores.push(DecisionScore {
                        predicate: p,
                        start: i + 1,
                        end: i + 1,
                        label: role.clone(),
                        score: row[k],
                    });
                    args.push(DepArg { index: i + 1, role });
                }
            }
            out.frames.push(Frame {
                predicate: p,
                sense,
                args: Arguments::Dep(args),
            });
        }
        Ok(out)
    }
}
