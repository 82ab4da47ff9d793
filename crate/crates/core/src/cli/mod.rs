//! Command implementations and the flat key=value run configuration.
//!
//! Each `cmd_*` function is usable directly from Rust; [`run`] wires them to
//! command-line arguments for the `gikt` binary.

mod args;
mod commands;
mod config;

pub use args::{execute, run, Cli, Command};
pub use commands::{
    cmd_ablate, cmd_eval, cmd_grid, cmd_prepare, cmd_train, stats_path, AblationPlan, TrainArtifacts, CHECKPOINT_FILE,
    CONFIG_FILE, INDEX_FILE, METRICS_FILE,
};
pub use config::RunConfig;
