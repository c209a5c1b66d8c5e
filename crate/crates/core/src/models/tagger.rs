use crate::layers::{BiLstm, EncoderConfig, Linear, ParamBuilder};
use crate::numcore::{Graph, Var};

use super::encoder::SentenceEncoder;
use super::labels::{sense_label, sense_string, Labels, NULL};
use super::{argmax_in, Ctx, Decisions, ModelError, Prepared};

/// Token tagger over `null ∪ senses`: identifies predicates and picks
/// their senses. Shares the word representation of the argument model.
#[derive(Debug, Clone)]
pub struct PredicateTagger {
    bilstm: BiLstm,
    out: Linear,
}

impl PredicateTagger {
    pub fn new(
        p: &mut ParamBuilder,
        d_in: usize,
        encoder: &EncoderConfig,
        labels: &Labels,
    ) -> Result<Self, ModelError> {
        let cfg = EncoderConfig { layers: 1, ..*encoder };
        let bilstm = BiLstm::new(&mut p.sub("bilstm"), d_in, &cfg)?;
        let out = Linear::new(&mut p.sub("out"), bilstm.out_dim(), labels.senses.len())?;
        Ok(PredicateTagger { bilstm, out })
    }

    fn scores(&self, g: &mut Graph, enc: &SentenceEncoder, lexical: Option<Var>, n: usize) -> Result<Var, ModelError> {
        let x = enc.word.with_indicator(g, lexical, &vec![0; n])?;
        let h = self.bilstm.encode(g, x)?;
        Ok(self.out.forward(g, h)?)
    }

    pub(crate) fn loss(
        &self,
        g: &mut Graph,
        ctx: &Ctx,
        enc: &SentenceEncoder,
        lexical: Option<Var>,
        prep: &Prepared,
        dec: &mut Decisions,
    ) -> Result<(), ModelError> {
        let s = prep.sentence;
        let mut targets = vec![NULL; s.len()];
        for f in &s.frames {
            targets[f.predicate - 1] = ctx.labels.senses.id(sense_label(&f.sense)).unwrap_or(NULL);
        }
        let logits = self.scores(g, enc, lexical, s.len())?;
        dec.push(g, logits, &targets)
    }

    /// `(predicate, sense, score)` triples. With `given` positions only
    /// their senses are decided.
    pub(crate) fn predict(
        &self,
        g: &mut Graph,
        ctx: &Ctx,
        enc: &SentenceEncoder,
        lexical: Option<Var>,
        n: usize,
        given: Option<&[usize]>,
    ) -> Result<Vec<(usize, String, f64)>, ModelError> {
        let logits = self.scores(g, enc, lexical, n)?;
        let t = g.value(logits);
        let k = ctx.labels.senses.len();
        let mut out = Vec::new();
        match given {
            Some(ps) => {
                for &p in ps {
                    let row = t.row_slice(p - 1);
                    let best = argmax_in(row, 1..k);
                    out.push((p, sense_string(ctx.labels.senses.name(best)), row[best]));
                }
            }
            None => {
                for i in 0..n {
                    let row = t.row_slice(i);
                    let best = argmax_in(row, 0..k);
                    if best != NULL {
                        out.push((i + 1, sense_string(ctx.labels.senses.name(best)), row[best]));
                    }
                }
            }
        }
        Ok(out)
    }
}
