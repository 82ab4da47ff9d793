//! Knowledge tracing over a question-skill relation graph.
//!
//! The crate trains a knowledge-tracing model that propagates question and
//! skill embeddings over a bipartite relation graph, tracks each student with a
//! stacked LSTM, recalls related history entries for the target question, and
//! predicts correctness from a bi-attention weighted set of pairwise
//! interactions. Every gradient comes from the crate's own reverse-mode tape in
//! [`numerics`].
//!
//! Module map:
//!
//! - [`numerics`]: tensors, autodiff tape, initializers
//! - [`data`]: interaction-log parsing, sequence building, splits, batches
//! - [`graph`]: relation graph, neighbor sampling, GCN propagation
//! - [`model`]: parameters, the forward pass and checkpoints
//! - [`training`]: loss, Adam, training loop, averaged prediction
//! - [`eval`]: AUC, variants, grid search, reports
//! - [`cli`]: flat key=value run configs and the command implementations
//! - [`synth`]: synthetic interaction logs for tests and examples

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod synth;
pub mod training;

pub use error::{GiktError, Result};
