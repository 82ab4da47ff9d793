//! Mini-batch training with Adam, per-epoch evaluation and early stopping.

mod adam;
mod predict;
mod trainer;

pub use adam::{adam_update, clip_global_norm, AdamState, BETA1, BETA2, EPSILON};
pub use predict::{predict, prediction_pairs, SequencePrediction};
pub use trainer::{batch_loss, train, EpochMetrics, TrainConfig, TrainOutcome, METRICS_HEADER};
