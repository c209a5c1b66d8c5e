use crate::corpus::{bio_to_spans, spans_to_bio, Arguments, DepArg, Frame, Style, Vocabularies};
use crate::layers::{Mlp, ParamBuilder};
use crate::numcore::{Graph, Tensor, Var};

use super::config::{ModelConfig, SyntaxMode};
use super::encoder::SentenceEncoder;
use super::labels::{Labels, NULL};
use super::tagger::PredicateTagger;
use super::{argmax_in, Ctx, DecisionScore, Decisions, ModelError, Prediction, Prepared};

/// One tagging pass per predicate: indicator embedding at the predicate,
/// encoder, MLP tag scores, per-token argmax.
#[derive(Debug, Clone)]
pub struct SequenceNet {
    pub enc: SentenceEncoder,
    pub mlp: Mlp,
    pub tagger: PredicateTagger,
}

struct Pass {
    /// 0-based token positions fed to the encoder.
    positions: Vec<usize>,
    /// Per-position admissibility (soft pruning).
    keep: Vec<bool>,
    logits: Var,
}

impl SequenceNet {
    pub fn new(
        p: &mut ParamBuilder,
        cfg: &ModelConfig,
        vocabs: &Vocabularies,
        labels: &Labels,
        pretrained: Option<Tensor>,
    ) -> Result<Self, ModelError> {
        let enc = SentenceEncoder::new(p, cfg, vocabs, pretrained)?;
        let mlp = Mlp::new(&mut p.sub("tag_mlp"), enc.out_dim(), &cfg.mlp_hidden, labels.tags.len())?;
        let tagger = PredicateTagger::new(&mut p.sub("tagger"), enc.word.out_dim(), &cfg.encoder, labels)?;
        Ok(SequenceNet { enc, mlp, tagger })
    }

    fn pass(
        &self,
        g: &mut Graph,
        ctx: &Ctx,
        prep: &Prepared,
        lexical: Option<Var>,
        p: usize,
    ) -> Result<Pass, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let mask = ctx.prune_mask(s, p)?;
        let hard = matches!(ctx.cfg.syntax, SyntaxMode::HardPrune { .. });
        let (positions, keep) = match mask {
            Some(m) if hard => ((0..n).filter(|&i| m[i]).collect::<Vec<_>>(), vec![true; n]),
            Some(m) => ((0..n).collect(), m),
            None => ((0..n).collect(), vec![true; n]),
        };
        let lex = match lexical {
            Some(l) if positions.len() < n => Some(g.gather(l, &positions)?),
            other => other,
        };
        let flags: Vec<usize> = positions.iter().map(|&i| usize::from(i + 1 == p)).collect();
        let states = self.enc.encode(g, lex, &flags, prep.syntax.as_ref(), ctx.vocabs)?;
        let logits = self.mlp.forward(g, states)?;
        Ok(Pass {
            positions,
            keep,
            logits,
        })
    }

    pub(crate) fn loss(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Option<Var>, ModelError> {
        let s = prep.sentence;
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let mut dec = Decisions::default();
        self.tagger.loss(g, ctx, &self.enc, lexical, prep, &mut dec)?;
        for f in &s.frames {
            let gold = gold_tags(ctx, f, s.len())?;
            let pass = self.pass(g, ctx, prep, lexical, f.predicate)?;
            let rows: Vec<usize> = (0..pass.positions.len())
                .filter(|&r| pass.keep[pass.positions[r]])
                .collect();
            if rows.is_empty() {
                continue;
            }
            let targets: Vec<usize> = rows.iter().map(|&r| gold[pass.positions[r]]).collect();
            let logits = if rows.len() < pass.positions.len() {
                g.gather(pass.logits, &rows)?
            } else {
                pass.logits
            };
            dec.push(g, logits, &targets)?;
        }
        dec.finish(g)
    }

    pub(crate) fn predict(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Prediction, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let given = ctx.cfg.given_predicates.then_some(prep.predicates.as_slice());
        let preds = self.tagger.predict(g, ctx, &self.enc, lexical, n, given)?;
        let mut out = Prediction::default();
        for (p, sense, score) in preds {
            out.scores.push(DecisionScore {
                predicate: p,
                start: 0,
                end: 0,
                label: sense.clone(),
                score,
            });
            let pass = self.pass(g, ctx, prep, lexical, p)?;
            let t = g.value(pass.logits);
            let mut tags = vec![NULL; n];
            let mut best = vec![0.0; n];
            for (r, &i) in pass.positions.iter().enumerate() {
                let row = t.row_slice(r);
                let k = argmax_in(row, 0..row.len());
                best[i] = row[k];
                if pass.keep[i] {
                    tags[i] = k;
                }
            }
            let args = match ctx.cfg.style {
                Style::Dep => {
                    let mut args = Vec::new();
                    for i in (0..n).filter(|&i| tags[i] != NULL) {
                        let role = ctx.labels.tags.name(tags[i]).to_string();
                        out.scores.push(DecisionScore {
                            predicate: p,
                            start: i + 1,
                            end: i + 1,
                            label: role.clone(),
                            score: best[i],
                        });
                        args.push(DepArg { index: i + 1, role });
                    }
                    Arguments::Dep(args)
                }
                Style::Span => {
                    let names: Vec<&str> = tags.iter().map(|&k| ctx.labels.tags.name(k)).collect();
                    let spans = bio_to_spans(&names);
                    for a in &spans {
                        out.scores.push(DecisionScore {
                            predicate: p,
                            start: a.start,
                            end: a.end,
                            label: a.role.clone(),
                            score: best[a.start - 1],
                        });
                    }
                    Arguments::Span(spans)
                }
            };
            out.frames.push(Frame {
                predicate: p,
                sense,
                args,
            });
        }
        Ok(out)
    }
}

/// Gold tag id per token; unseen roles map to the null tag.
fn gold_tags(ctx: &Ctx, f: &Frame, n: usize) -> Result<Vec<usize>, ModelError> {
    let mut tags = vec![NULL; n];
    match ctx.cfg.style {
        Style::Dep => {
            for a in f.dep_args() {
                tags[a.index - 1] = ctx.labels.tags.id(&a.role).unwrap_or(NULL);
            }
        }
        Style::Span => {
            for (i, t) in spans_to_bio(f, n)?.iter().enumerate() {
                tags[i] = ctx.labels.tags.id(t).unwrap_or(NULL);
            }
        }
    }
    Ok(tags)
}
