use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Sentence, Style};
use crate::eval::{dep_srl_score, span_srl_score};
use crate::numcore::{AdamConfig, Gradients, Graph};

use super::{check_style, ModelError, SrlModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Stop once the dev F1 reaches this value.
    pub target_f1: Option<f64>,
    /// Dev F1 is computed every this many epochs and after the last one.
    pub eval_every: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 64,
            lr: 2e-3,
            target_f1: None,
            eval_every: 1,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Mean sentence loss over the epoch.
    pub loss: f64,
    pub dev_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainOutcome {
    pub metrics: Vec<EpochMetrics>,
    pub best_epoch: usize,
    pub best_f1: f64,
}

impl TrainOutcome {
    /// `epoch,loss,dev_f1` rows; epochs without evaluation leave dev_f1 empty.
    pub fn metrics_csv(&self) -> String {
        let mut s = String::from("epoch,loss,dev_f1\n");
        for m in &self.metrics {
            let f1 = m.dev_f1.map(|f| format!("{:.2}", f)).unwrap_or_default();
            s.push_str(&format!("{},{:.6},{}\n", m.epoch, m.loss, f1));
        }
        s
    }
}

/// Argument F1 of the model's predictions on `gold` (senses included for
/// dependency style when the config asks for it).
pub fn evaluate_f1(model: &SrlModel, gold: &[Sentence]) -> Result<f64, ModelError> {
    let pred = model.annotate(gold)?;
    let report = match model.cfg.style {
        Style::Dep => dep_srl_score(gold, &pred, model.cfg.include_senses)?,
        Style::Span => span_srl_score(gold, &pred)?,
    };
    Ok(report.f1)
}

fn dropout_seed(seed: u64, epoch: usize, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((epoch as u64) << 32) ^ index as u64
}

/// Mini-batch Adam over shuffled sentences. Per-sentence gradients are
/// computed in parallel and summed in batch order, so results do not
/// depend on the thread count. Parameters of the best dev epoch are
/// restored at the end; without `dev` the training set is scored.
pub fn train(
    model: &mut SrlModel,
    train: &[Sentence],
    dev: Option<&[Sentence]>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    if cfg.batch_size == 0 || cfg.eval_every == 0 {
        return Err(ModelError::Config("batch_size and eval_every must be positive".into()));
    }
    check_style(train, model.cfg.style)?;
    let dev = dev.unwrap_or(train);
    let adam = AdamConfig {
        lr: cfg.lr,
        ..AdamConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut metrics = Vec::new();
    let mut best: Option<(usize, f64, Vec<crate::numcore::Tensor>)> = None;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let (mut total, mut count) = (0.0, 0usize);
        for batch in order.chunks(cfg.batch_size) {
            let store = &model.store;
            let m = &*model;
            let results: Vec<Result<Option<(f64, Gradients)>, ModelError>> = batch
                .par_iter()
                .map(|&i| {
                    let mut g = Graph::training(store, dropout_seed(cfg.seed, epoch, i));
                    match m.loss(&mut g, &train[i])? {
                        None => Ok(None),
                        Some(l) => {
                            let v = g.value(l).item();
                            Ok(Some((v, g.backward(l)?)))
                        }
                    }
                })
                .collect();
            let mut grads = Gradients::new(store.len());
            let mut used = 0usize;
            for r in results {
                if let Some((v, gr)) = r? {
                    total += v;
                    count += 1;
                    used += 1;
                    grads.merge(gr);
                }
            }
            if used == 0 {
                continue;
            }
            grads.scale(1.0 / used as f64);
            model.store.adam_step(&grads, &adam)?;
        }
        let loss = if count == 0 { 0.0 } else { total / count as f64 };
        let dev_f1 = if epoch % cfg.eval_every == 0 || epoch == cfg.epochs {
            Some(evaluate_f1(model, dev)?)
        } else {
            None
        };
        metrics.push(EpochMetrics { epoch, loss, dev_f1 });
        if let Some(f1) = dev_f1 {
            if best.as_ref().is_none_or(|b| f1 > b.1) {
                best = Some((epoch, f1, model.store.snapshot()));
            }
            if cfg.target_f1.is_some_and(|t| f1 >= t) {
                break;
            }
        }
    }
    let (best_epoch, best_f1) = match best {
        Some((e, f, snap)) => {
            model.store.restore(snap);
            (e, f)
        }
        None => (0, 0.0),
    };
    Ok(TrainOutcome {
        metrics,
        best_epoch,
        best_f1,
    })
}
