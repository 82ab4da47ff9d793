use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::adam::{adam_update, clip_global_norm, AdamState};
use super::predict::{predict, prediction_pairs};
use crate::data::{batch_iterator, Batch, Dataset};
use crate::error::{GiktError, Result};
use crate::eval::auc;
use crate::graph::{build_graph, RelationGraph};
use crate::model::{forward_batch, sample_batch, BatchSample, GiktParams, ModelConfig};
use crate::numerics::{Tape, Tensor, Var};
use crate::rng::{self, derive_seed};

pub const METRICS_HEADER: &str = "epoch\ttrain_loss\ttest_auc\twall_seconds";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Stop after this many epochs without a better test AUC; 0 disables.
    pub patience: usize,
    pub seed: u64,
    /// Sampling repetitions averaged at inference.
    pub inference_runs: usize,
    pub max_len: usize,
    /// Fraction of sequences assigned to the training split.
    pub train_ratio: f64,
    /// Sum the per-prediction losses instead of averaging them.
    pub sum_loss: bool,
    /// Global gradient-norm bound; `None` leaves gradients untouched.
    pub clip_norm: Option<f64>,
    /// Worker threads used for inference.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelConfig::default(),
            batch_size: 32,
            learning_rate: 0.001,
            epochs: 50,
            patience: 5,
            seed: 0,
            inference_runs: 3,
            max_len: 200,
            train_ratio: 0.8,
            sum_loss: false,
            clip_norm: None,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.batch_size == 0 {
            return Err(GiktError::Config("batch_size must be positive".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(GiktError::Config(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.inference_runs == 0 {
            return Err(GiktError::Config("inference_runs must be at least 1".into()));
        }
        if self.max_len < 2 {
            return Err(GiktError::Config("max_len must be at least 2".into()));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(GiktError::Config(format!(
                "train_ratio must lie in (0, 1), got {}",
                self.train_ratio
            )));
        }
        if let Some(c) = self.clip_norm {
            if c.is_nan() || c <= 0.0 {
                return Err(GiktError::Config(format!("clip_norm must be positive, got {c}")));
            }
        }
        if self.threads == 0 {
            return Err(GiktError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_auc: f64,
    pub wall_seconds: f64,
}

impl EpochMetrics {
    /// One tab-separated metrics log line matching [`METRICS_HEADER`].
    pub fn log_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{:.3}",
            self.epoch, self.train_loss, self.test_auc, self.wall_seconds
        )
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters of the epoch with the best test AUC.
    pub best: GiktParams,
    pub last: GiktParams,
    pub best_epoch: usize,
    pub best_auc: f64,
    pub history: Vec<EpochMetrics>,
}

/// Loss of one batch: forward, BCE and the gradient of every parameter.
/// Returns `None` when the batch has nothing to predict.
pub fn batch_loss(
    params: &GiktParams,
    graph: &RelationGraph,
    sample: &BatchSample,
    batch: &Batch,
    config: &TrainConfig,
    dropout_seed: Option<u64>,
) -> Result<Option<(f64, usize, Vec<Tensor>)>> {
    if batch.max_len() < 2 {
        return Ok(None);
    }
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape, true);
    let mut drop_rng = dropout_seed.map(|s| rng::stream(s, "dropout", &[]));
    let out = forward_batch(&mut tape, &bound, graph, sample, batch, &config.model, drop_rng.as_mut())?;
    let n = out.labels.len();
    if n == 0 {
        return Ok(None);
    }
    let scale = if config.sum_loss { 1.0 } else { 1.0 / n as f64 };
    let loss = tape.bce(out.predictions, &out.labels, scale)?;
    tape.backward(loss)?;
    let value = tape.value(loss).item();
    let grads = bound
        .vars()
        .into_iter()
        .map(|v: Var| {
            tape.grad(v)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(tape.value(v).shape()))
        })
        .collect();
    Ok(Some((value, n, grads)))
}

/// Train on `train`, scoring `test` after every epoch.
pub fn train(
    train: &Dataset,
    test: &Dataset,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<TrainOutcome> {
    config.validate()?;
    let graph = build_graph(train)?;
    let mut init_rng = rng::stream(config.seed, "init", &[]);
    let mut params = GiktParams::init(&config.model, train.question_count, train.skill_count, &mut init_rng);
    let names: Vec<String> = params.named().into_iter().map(|(n, _)| n).collect();
    let mut adam = AdamState::new(params.named().into_iter().map(|(_, t)| t));

    let mut history = Vec::new();
    let mut best: Option<(usize, f64, GiktParams)> = None;
    let mut stale = 0usize;
    let start = Instant::now();
    for epoch in 1..=config.epochs {
        let order_seed = derive_seed(config.seed, "epoch_order", &[epoch as u64]);
        let mut loss_total = 0.0;
        let mut count = 0usize;
        for (bi, batch) in batch_iterator(train, config.batch_size, config.max_len, Some(order_seed)).enumerate() {
            let idx = [epoch as u64, bi as u64];
            let sample = sample_batch(&graph, &config.model, derive_seed(config.seed, "batch_sample", &idx));
            let dseed = derive_seed(config.seed, "batch_dropout", &idx);
            let diverged = |reason: String| GiktError::Diverged { epoch, batch: bi, reason };
            let step = match batch_loss(&params, &graph, &sample, &batch, config, Some(dseed)) {
                Ok(s) => s,
                Err(GiktError::Numeric(m)) => return Err(diverged(m)),
                Err(e) => return Err(e),
            };
            let Some((value, n, mut grads)) = step else {
                continue;
            };
            if !value.is_finite() {
                return Err(diverged(format!("loss is {value}")));
            }
            if let Some(c) = config.clip_norm {
                clip_global_norm(&mut grads, c);
            }
            let mut tensors = params.tensors_mut();
            adam_update(&mut tensors, &grads, &names, &mut adam, config.learning_rate)
                .map_err(|e| diverged(e.to_string()))?;
            loss_total += if config.sum_loss { value } else { value * n as f64 };
            count += n;
        }
        if count == 0 {
            return Err(GiktError::EmptySelection(
                "training data has no sequence with at least 2 steps".into(),
            ));
        }
        let preds = predict(&params, &graph, test, config)?;
        let (scores, labels) = prediction_pairs(&preds);
        let test_auc = auc(&scores, &labels)?;
        let metrics = EpochMetrics {
            epoch,
            train_loss: loss_total / count as f64,
            test_auc,
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        log::info!("{}", metrics.log_line());
        on_epoch(&metrics);
        history.push(metrics);

        if best.as_ref().is_none_or(|(_, a, _)| test_auc > *a) {
            best = Some((epoch, test_auc, params.clone()));
            stale = 0;
        } else {
            stale += 1;
            if config.patience > 0 && stale >= config.patience {
                break;
            }
        }
    }
    let (best_epoch, best_auc, best_params) = best.ok_or_else(|| GiktError::Config("epochs must be at least 1".into()))?;
    Ok(TrainOutcome {
        best: best_params,
        last: params,
        best_epoch,
        best_auc,
        history,
    })
}
