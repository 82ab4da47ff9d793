//! Interaction logs to student exercise sequences.
//!
//! Raw logs are delimiter-separated text with a header row; a [`FormatSpec`]
//! names the columns. Parsing merges multi-skill rows and drops exact
//! duplicates, [`build_sequences`] groups by student with dense ids, and
//! [`batch_iterator`] cuts long sequences into segments and pads batches.

mod batch;
mod parse;
mod sequences;
mod store;

pub use batch::{batch_iterator, segment, Batch, BatchIter};
pub use parse::{parse_log, parse_reader, write_log, FormatSpec, InteractionRecord, ParseReport};
pub use sequences::{build_sequences, split_train_test, Dataset, DatasetStats, ExerciseSequence, Step};
pub use store::{load_dataset, save_dataset, DATASET_FORMAT, DATASET_VERSION};

/// Sequences must be strictly longer than this to be kept.
pub const MIN_SEQUENCE_LEN_EXCLUSIVE: usize = 3;
