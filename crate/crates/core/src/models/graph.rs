use std::collections::HashMap;

use crate::corpus::{Arguments, DepArg, Frame, SpanArg, Style, Vocabularies};
use crate::layers::{Biaffine, Linear, ParamBuilder, SpanRepr, Unary};
use crate::numcore::{Graph, ParamId, Tensor, Var};
use crate::pruning::{boundary_set, constituent_prune, enumerate_spans};

use super::config::{ModelConfig, SyntaxMode};
use super::encoder::SentenceEncoder;
use super::labels::{sense_label, sense_string, Labels, NULL};
use super::{argmax_in, Ctx, DecisionScore, Decisions, ModelError, Prediction, Prepared};

/// `⌈β·n⌉`, at least 1.
pub fn beam_size(beta: f64, n: usize) -> usize {
    ((beta * n as f64).ceil() as usize).max(1)
}

/// Indices of the `k` highest scores, ties to the lower index, returned
/// in ascending index order.
pub fn top_k_by_score(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// All scores behind one graph decode.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphScores {
    /// Argument candidates `(start, end)`, ordered by start then end.
    pub pool: Vec<(usize, usize)>,
    /// φ_p per token.
    pub pred_unary: Vec<f64>,
    /// φ_a per pool item.
    pub arg_unary: Vec<f64>,
    /// Predicate positions in the beam, ascending.
    pub pred_beam: Vec<usize>,
    /// Pool indices in the beam, ascending.
    pub arg_beam: Vec<usize>,
    /// `pairs[j][i][r]`: beam predicate `j`, beam argument `i`, role `r`.
    pub pairs: Vec<Vec<Vec<f64>>>,
    /// `senses[j][s]` over `null ∪ senses`.
    pub senses: Vec<Vec<f64>>,
    /// `admissible[j][i]`: the pair survives syntactic pruning.
    pub admissible: Vec<Vec<bool>>,
}

/// Predicates and arguments as nodes of a labeled bipartite graph, with
/// unary-score beams over both sides.
#[derive(Debug, Clone)]
pub struct GraphNet {
    pub enc: SentenceEncoder,
    pub span: Option<SpanRepr>,
    pub phi_p: Unary,
    pub phi_a: Unary,
    pub pred_head: Linear,
    pub arg_head: Linear,
    pub biaffine: Biaffine,
    pub root: ParamId,
    pub sense_pred: Linear,
    pub sense_root: Linear,
    pub sense_biaffine: Biaffine,
}

struct Forward {
    pool: Vec<(usize, usize)>,
    phi_p: Var,
    phi_a: Option<Var>,
    pred_beam: Vec<usize>,
    arg_beam: Vec<usize>,
    pairs: Vec<Var>,
    senses: Option<Var>,
    admissible: Vec<Vec<bool>>,
}

impl GraphNet {
    pub fn new(
        p: &mut ParamBuilder,
        cfg: &ModelConfig,
        vocabs: &Vocabularies,
        labels: &Labels,
        pretrained: Option<Tensor>,
    ) -> Result<Self, ModelError> {
        let enc = SentenceEncoder::new(p, cfg, vocabs, pretrained)?;
        let d = enc.out_dim();
        let span = match cfg.style {
            Style::Span => Some(SpanRepr::new(
                &mut p.sub("span"),
                d,
                cfg.span_attn_hidden,
                cfg.size_dim,
            )?),
            Style::Dep => None,
        };
        let d_arg = span.as_ref().map_or(d, SpanRepr::out_dim);
        let dh = cfg.head_dim;
        Ok(GraphNet {
            phi_p: Unary::new(&mut p.sub("phi_p"), d, cfg.unary_hidden)?,
            phi_a: Unary::new(&mut p.sub("phi_a"), d_arg, cfg.unary_hidden)?,
            pred_head: Linear::new(&mut p.sub("pred_head"), d, dh)?,
            arg_head: Linear::new(&mut p.sub("arg_head"), d_arg, dh)?,
            biaffine: Biaffine::new(&mut p.sub("biaffine"), dh, dh, labels.roles.len())?,
            root: p.matrix("root", 1, d)?,
            sense_pred: Linear::new(&mut p.sub("sense_pred"), d, dh)?,
            sense_root: Linear::new(&mut p.sub("sense_root"), d, dh)?,
            sense_biaffine: Biaffine::new(&mut p.sub("sense_biaffine"), dh, dh, labels.senses.len())?,
            span,
            enc,
        })
    }

    /// Argument candidate pool before the beam.
    pub fn candidate_pool(ctx: &Ctx, prep: &Prepared) -> Result<Vec<(usize, usize)>, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let mut pool = match ctx.cfg.style {
            Style::Dep => (1..=n).map(|i| (i, i)).collect(),
            Style::Span => enumerate_spans(n, ctx.cfg.span_len()),
        };
        if matches!(ctx.cfg.syntax, SyntaxMode::ConstPrune) {
            let ct = s.consts.as_ref().ok_or(ModelError::MissingTree("constituency"))?;
            pool = constituent_prune(&pool, &boundary_set(ct));
        }
        pool.sort_unstable();
        Ok(pool)
    }

    fn forward(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Forward, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let flags: Vec<usize> = (1..=n).map(|i| usize::from(prep.predicates.contains(&i))).collect();
        let states = self.enc.encode(g, lexical, &flags, prep.syntax.as_ref(), ctx.vocabs)?;

        let phi_p = self.phi_p.forward(g, states)?;
        let pred_beam = if ctx.cfg.given_predicates {
            prep.predicates.clone()
        } else {
            let k = beam_size(ctx.cfg.beta_p, n);
            top_k_by_score(g.value(phi_p).data(), k)
                .into_iter()
                .map(|i| i + 1)
                .collect()
        };

        let pool = Self::candidate_pool(ctx, prep)?;
        let (arg_repr, phi_a, arg_beam) = if pool.is_empty() {
            (None, None, Vec::new())
        } else {
            let repr = match &self.span {
                Some(sr) => sr.forward(g, states, &pool)?,
                None => states,
            };
            let phi_a = self.phi_a.forward(g, repr)?;
            let beam = top_k_by_score(g.value(phi_a).data(), beam_size(ctx.cfg.beta_a, n));
            (Some(repr), Some(phi_a), beam)
        };

        let mut pairs = Vec::new();
        let mut admissible = Vec::new();
        let mut senses = None;
        if !pred_beam.is_empty() {
            let rows: Vec<usize> = pred_beam.iter().map(|p| p - 1).collect();
            let pstates = g.gather(states, &rows)?;
            if let (Some(repr), false) = (arg_repr, arg_beam.is_empty()) {
                let a = g.gather(repr, &arg_beam)?;
                let za = self.arg_head.forward(g, a)?;
                let ha = g.relu(za);
                let zp = self.pred_head.forward(g, pstates)?;
                let hp = g.relu(zp);
                for (j, &p) in pred_beam.iter().enumerate() {
                    let pj = g.row(hp, j)?;
                    pairs.push(self.biaffine.score(g, ha, pj)?);
                    let mask = ctx.prune_mask(s, p)?;
                    admissible.push(
                        arg_beam
                            .iter()
                            .map(|&i| mask.as_ref().is_none_or(|m| m[pool[i].0 - 1]))
                            .collect(),
                    );
                }
            } else {
                admissible = vec![Vec::new(); pred_beam.len()];
            }
            let zs = self.sense_pred.forward(g, pstates)?;
            let hs = g.relu(zs);
            let r = g.param(self.root);
            let zr = self.sense_root.forward(g, r)?;
            let hr = g.relu(zr);
            senses = Some(self.sense_biaffine.score(g, hs, hr)?);
        }
        Ok(Forward {
            pool,
            phi_p,
            phi_a,
            pred_beam,
            arg_beam,
            pairs,
            senses,
            admissible,
        })
    }

    pub(crate) fn loss(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Option<Var>, ModelError> {
        let s = prep.sentence;
        let n = s.len();
        let fw = self.forward(g, ctx, prep)?;
        let mut gold: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut gold_sense: HashMap<usize, usize> = HashMap::new();
        for f in &s.frames {
            gold_sense.insert(f.predicate, ctx.labels.senses.id(sense_label(&f.sense)).unwrap_or(NULL));
            for (st, en, role) in frame_items(f) {
                gold.insert((f.predicate, st, en), ctx.labels.roles.id(role).unwrap_or(NULL));
            }
        }
        let mut dec = Decisions::default();
        for (j, &p) in fw.pred_beam.iter().enumerate() {
            let Some(&pairs) = fw.pairs.get(j) else { continue };
            let rows: Vec<usize> = (0..fw.arg_beam.len()).filter(|&i| fw.admissible[j][i]).collect();
            if rows.is_empty() {
                continue;
            }
            let targets: Vec<usize> = rows
                .iter()
                .map(|&i| {
                    let (st, en) = fw.pool[fw.arg_beam[i]];
                    gold.get(&(p, st, en)).copied().unwrap_or(NULL)
                })
                .collect();
            let logits = if rows.len() < fw.arg_beam.len() {
                g.gather(pairs, &rows)?
            } else {
                pairs
            };
            dec.push(g, logits, &targets)?;
        }
        if let Some(senses) = fw.senses {
            let targets: Vec<usize> = fw
                .pred_beam
                .iter()
                .map(|p| gold_sense.get(p).copied().unwrap_or(NULL))
                .collect();
            dec.push(g, senses, &targets)?;
        }
        if ctx.cfg.aux_weight > 0.0 {
            if !ctx.cfg.given_predicates {
                let t: Vec<f64> = (1..=n)
                    .map(|i| if gold_sense.contains_key(&i) { 1.0 } else { 0.0 })
                    .collect();
                let b = g.bce_with_logits(fw.phi_p, &t)?;
                dec.push_extra(g.scale(b, ctx.cfg.aux_weight));
            }
            if let Some(phi_a) = fw.phi_a {
                let gold_args: std::collections::HashSet<(usize, usize)> =
                    gold.keys().map(|&(_, a, b)| (a, b)).collect();
                let t: Vec<f64> = fw
                    .pool
                    .iter()
                    .map(|x| if gold_args.contains(x) { 1.0 } else { 0.0 })
                    .collect();
                let b = g.bce_with_logits(phi_a, &t)?;
                dec.push_extra(g.scale(b, ctx.cfg.aux_weight));
            }
        }
        dec.finish(g)
    }

    pub fn scores(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<GraphScores, ModelError> {
        let fw = self.forward(g, ctx, prep)?;
        let rows = |t: &Tensor| t.to_rows();
        Ok(GraphScores {
            pred_unary: g.value(fw.phi_p).data().to_vec(),
            arg_unary: fw.phi_a.map_or(Vec::new(), |v| g.value(v).data().to_vec()),
            pairs: fw.pairs.iter().map(|&v| rows(g.value(v))).collect(),
            senses: fw.senses.map_or(Vec::new(), |v| rows(g.value(v))),
            pool: fw.pool,
            pred_beam: fw.pred_beam,
            arg_beam: fw.arg_beam,
            admissible: fw.admissible,
        })
    }

    /// Role and sense scores of the single pair `(p, span)`, computed
    /// without beams.
    pub fn pair_scores(
        &self,
        g: &mut Graph,
        ctx: &Ctx,
        prep: &Prepared,
        p: usize,
        span: (usize, usize),
    ) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
        let n = prep.sentence.len();
        let lexical = self.enc.lexical(g, &prep.ids)?;
        let flags: Vec<usize> = (1..=n).map(|i| usize::from(prep.predicates.contains(&i))).collect();
        let states = self.enc.encode(g, lexical, &flags, prep.syntax.as_ref(), ctx.vocabs)?;
        let a = match &self.span {
            Some(sr) => sr.forward(g, states, &[span])?,
            None => g.row(states, span.0 - 1)?,
        };
        let za = self.arg_head.forward(g, a)?;
        let ha = g.relu(za);
        let ps = g.row(states, p - 1)?;
        let zp = self.pred_head.forward(g, ps)?;
        let hp = g.relu(zp);
        let roles = self.biaffine.score(g, ha, hp)?;
        let zs = self.sense_pred.forward(g, ps)?;
        let hs = g.relu(zs);
        let r = g.param(self.root);
        let zr = self.sense_root.forward(g, r)?;
        let hr = g.relu(zr);
        let senses = self.sense_biaffine.score(g, hs, hr)?;
        Ok((g.value(roles).data().to_vec(), g.value(senses).data().to_vec()))
    }

    pub(crate) fn predict(&self, g: &mut Graph, ctx: &Ctx, prep: &Prepared) -> Result<Prediction, ModelError> {
        let sc = self.scores(g, ctx, prep)?;
        Ok(decode(ctx, &sc))
    }
}

fn frame_items(f: &Frame) -> Vec<(usize, usize, &str)> {
    match &f.args {
        Arguments::Dep(a) => a.iter().map(|x| (x.index, x.index, x.role.as_str())).collect(),
        Arguments::Span(a) => a.iter().map(|x| (x.start, x.end, x.role.as_str())).collect(),
    }
}

/// Frames from graph scores: sense argmax per beam predicate (a non-null
/// sense identifies the predicate when none are given), role argmax per
/// admissible pair, and for spans greedy highest-score-first selection
/// skipping overlaps.
pub fn decode(ctx: &Ctx, sc: &GraphScores) -> Prediction {
    let n_senses = ctx.labels.senses.len();
    let n_roles = ctx.labels.roles.len();
    let mut out = Prediction::default();
    for (j, &p) in sc.pred_beam.iter().enumerate() {
        let srow = &sc.senses[j];
        let lo = if ctx.cfg.given_predicates { 1 } else { 0 };
        let k = argmax_in(srow, lo..n_senses);
        if k == NULL {
            continue;
        }
        let sense = sense_string(ctx.labels.senses.name(k));
        out.scores.push(DecisionScore {
            predicate: p,
            start: 0,
            end: 0,
            label: sense.clone(),
            score: srow[k],
        });
        let mut found: Vec<(usize, usize, usize, f64)> = Vec::new();
        if let Some(pairs) = sc.pairs.get(j) {
            for (i, row) in pairs.iter().enumerate() {
                if !sc.admissible[j][i] {
                    continue;
                }
                let r = argmax_in(row, 0..n_roles);
                if r != NULL {
                    let (st, en) = sc.pool[sc.arg_beam[i]];
                    found.push((st, en, r, row[r]));
                }
            }
        }
        let args = match ctx.cfg.style {
            Style::Dep => Arguments::Dep(
                found
                    .iter()
                    .map(|&(st, _, r, _)| DepArg {
                        index: st,
                        role: ctx.labels.roles.name(r).to_string(),
                    })
                    .collect(),
            ),
            Style::Span => {
                let mut order: Vec<usize> = (0..found.len()).collect();
                order.sort_by(|&a, &b| found[b].3.total_cmp(&found[a].3).then(a.cmp(&b)));
                let mut chosen: Vec<SpanArg> = Vec::new();
                let mut kept = Vec::new();
                for i in order {
                    let (st, en, r, _) = found[i];
                    let cand = SpanArg::new(st, en, ctx.labels.roles.name(r));
                    if chosen.iter().all(|c| !c.overlaps(&cand)) {
                        chosen.push(cand);
                        kept.push(i);
                    }
                }
                kept.sort_unstable();
                found = kept.iter().map(|&i| found[i]).collect();
                chosen.sort();
                Arguments::Span(chosen)
            }
        };
        for &(st, en, r, score) in &found {
            out.scores.push(DecisionScore {
                predicate: p,
                start: st,
                end: en,
                label: ctx.labels.roles.name(r).to_string(),
                score,
            });
        }
        out.frames.push(Frame {
            predicate: p,
            sense,
            args,
        });
    }
    out
}
