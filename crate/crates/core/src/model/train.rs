use serde::{Deserialize, Serialize};

use super::data::{fit_sequence, Batch};
use super::network::{loss_bce, loss_bce_grad, NormMode};
use super::optim::{cosine_lr, AdamW};
use super::params::ModelParams;
use super::ModelConfig;
use crate::band::TrainSequence;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ordering::OrderingConfig;
use crate::rng::{self, derive_seed};
use rand::Rng as _;

// independent random streams derived from the model seed
pub(crate) const INIT_STREAM: u64 = 0x1;
const TRAIN_STREAM: u64 = 0x2;
const VAL_STREAM: u64 = 0x3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_bce: f64,
    pub val_bce: f64,
    /// Learning rate of the epoch's last step.
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: Option<usize>,
    pub best_val_bce: Option<f64>,
}

impl ModelParams {
    /// Fresh parameters sized by `cfg`, which must have a row width.
    pub fn for_config(cfg: &ModelConfig) -> Result<ModelParams> {
        cfg.validate()?;
        let d = cfg.width()?;
        Ok(ModelParams::init(d, cfg.mlp_hidden, cfg.hidden, cfg.gru_layers, derive_seed(cfg.seed, INIT_STREAM)))
    }
}

fn draw_batch(
    graphs: &[Graph],
    picks: &mut rng::Rng,
    size: usize,
    ord: &OrderingConfig,
    ord_seed: u64,
    width: usize,
) -> Result<Batch> {
    let mut seqs: Vec<TrainSequence> = Vec::with_capacity(size);
    for j in 0..size {
        let g = &graphs[picks.random_range(0..graphs.len())];
        seqs.push(fit_sequence(g, &ord.with_seed(derive_seed(ord_seed, j as u64)), width)?);
    }
    Batch::new(&seqs.iter().collect::<Vec<_>>())
}

fn eval_bce(params: &ModelParams, batches: &[Batch]) -> Result<f64> {
    let mut total = 0.0;
    for b in batches {
        let f = params.forward(&b.inputs, &b.lengths, NormMode::Eval)?;
        total += loss_bce(&f.logits, &b.targets);
    }
    Ok(total / batches.len() as f64)
}

/// Teacher-forced training with AdamW and a cosine schedule over
/// `epochs × batches_per_epoch` steps. Each batch draws graphs uniformly with
/// replacement and orders every draw afresh. Returns the parameters from the
/// epoch with the lowest validation BCE (training BCE when `val` is empty).
pub fn train(
    mut params: ModelParams,
    cfg: &ModelConfig,
    train: &[Graph],
    val: &[Graph],
    ord: &OrderingConfig,
) -> Result<(ModelParams, History)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Input("training set is empty".into()));
    }
    let d = params.row_width();
    if let Some(w) = cfg.row_width {
        if w != d {
            return Err(Error::Input(format!("config row width {w} does not match parameters ({d})")));
        }
    }
    let width = d - 1;
    for g in train {
        fit_sequence(g, ord, width)?;
    }

    let val_seed = derive_seed(cfg.seed, VAL_STREAM);
    let mut val_picks = rng::seeded(val_seed);
    let val_batches: Vec<Batch> = if val.is_empty() {
        Vec::new()
    } else {
        (0..cfg.val_batches.max(1))
            .map(|b| {
                let s = derive_seed(derive_seed(ord.seed, VAL_STREAM), b as u64);
                draw_batch(val, &mut val_picks, cfg.batch_size, ord, s, width)
            })
            .collect::<Result<_>>()?
    };

    let total_steps = cfg.epochs * cfg.batches_per_epoch;
    let mut opt = AdamW::new(&params, cfg.weight_decay);
    let mut picks = rng::seeded(derive_seed(cfg.seed, TRAIN_STREAM));
    let mut history = History::default();
    let mut best: Option<(f64, ModelParams)> = None;
    let mut step = 0;
    for epoch in 0..cfg.epochs {
        let epoch_seed = derive_seed(ord.seed, epoch as u64);
        let mut train_total = 0.0;
        let mut lr = cfg.lr;
        for b in 0..cfg.batches_per_epoch {
            let s = derive_seed(epoch_seed, b as u64);
            let batch = draw_batch(train, &mut picks, cfg.batch_size, ord, s, width)?;
            let f = params.forward(&batch.inputs, &batch.lengths, NormMode::Train)?;
            let loss = loss_bce(&f.logits, &batch.targets);
            if !loss.is_finite() {
                return Err(Error::Numeric(format!("training loss became {loss} at epoch {epoch}")));
            }
            let mut grads = params.backward(&f, &loss_bce_grad(&f.logits, &batch.targets));
            params.update_norm_stats(&f);
            lr = cosine_lr(cfg.lr, step, total_steps);
            opt.step(&mut params, &mut grads, lr);
            train_total += loss;
            step += 1;
        }
        let train_bce = train_total / cfg.batches_per_epoch.max(1) as f64;
        let val_bce = if val_batches.is_empty() { train_bce } else { eval_bce(&params, &val_batches)? };
        history.epochs.push(EpochRecord { epoch, train_bce, val_bce, lr });
        if best.as_ref().is_none_or(|(b, _)| val_bce < *b) {
            best = Some((val_bce, params.clone()));
            history.best_epoch = Some(epoch);
            history.best_val_bce = Some(val_bce);
        }
    }
    Ok((best.map(|(_, p)| p).unwrap_or(params), history))
}
