//! The knowledge-tracing forward pass.
//!
//! Per batch: propagate embeddings over the relation graph, encode each
//! history exercise, run the stacked LSTM, recall related history entries for
//! every target question, and score the pair grid between
//! {current state, recalled entries} and {target question, related skills}.

mod cells;
mod checkpoint;
mod config;
mod forward;
mod interaction;
mod params;
mod recap;

pub use cells::{encode_exercise, lstm_layer, lstm_step};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{ModelConfig, RecapMode};
pub use forward::{forward_batch, forward_sequence, sample_batch, BatchSample, ForwardOutput};
pub use interaction::{interaction_predict, InteractionOutput, PairGroup};
pub use params::{BoundParams, GcnLayerParams, GiktParams, LstmLayerParams, LstmLayerVars};
pub use recap::{cosine, recap_hard, recap_soft, top_k_above, RecapSelection};
