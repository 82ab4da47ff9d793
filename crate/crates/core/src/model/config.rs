use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GiktError, Result};
use crate::graph::GcnConfig;

/// Which history entries the recap module selects and how.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecapMode {
    /// Exercises whose question has exactly the target's skill set.
    HardExercise,
    /// Exercises ranked by embedding similarity to the target question.
    SoftExercise,
    /// Hidden states at the hard-selected timesteps.
    HardState,
    /// Hidden states at the soft-selected timesteps.
    SoftState,
}

impl RecapMode {
    pub fn is_soft(self) -> bool {
        matches!(self, RecapMode::SoftExercise | RecapMode::SoftState)
    }

    pub fn uses_states(self) -> bool {
        matches!(self, RecapMode::HardState | RecapMode::SoftState)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RecapMode::HardExercise => "hard_exercise",
            RecapMode::SoftExercise => "soft_exercise",
            RecapMode::HardState => "hard_state",
            RecapMode::SoftState => "soft_state",
        }
    }
}

impl fmt::Display for RecapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecapMode {
    type Err = GiktError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard_exercise" => Ok(RecapMode::HardExercise),
            "soft_exercise" => Ok(RecapMode::SoftExercise),
            "hard_state" => Ok(RecapMode::HardState),
            "soft_state" => Ok(RecapMode::SoftState),
            other => Err(GiktError::Config(format!(
                "unknown recap mode {other:?} (hard_exercise, soft_exercise, hard_state, soft_state)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embed_dim: usize,
    /// Cell sizes of the stacked LSTM; the last must equal `embed_dim`.
    pub lstm_sizes: Vec<usize>,
    pub gcn: GcnConfig,
    pub recap_mode: RecapMode,
    /// Maximum number of recalled history entries; 0 disables recap.
    pub recap_k: usize,
    /// Lower similarity bound for soft selection.
    pub recap_v: f64,
    /// Score soft recap on raw question embeddings instead of propagated ones.
    pub recap_on_raw_embeddings: bool,
    /// Related skills on the right side of the interaction grid; 0 keeps only the question.
    pub skills_in_interaction: usize,
    /// Replace the pair attention with a plain mean.
    pub uniform_attention: bool,
    pub keep_prob: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            embed_dim: 100,
            lstm_sizes: vec![200, 100],
            gcn: GcnConfig::default(),
            recap_mode: RecapMode::SoftState,
            recap_k: 5,
            recap_v: 0.0,
            recap_on_raw_embeddings: false,
            skills_in_interaction: 4,
            uniform_attention: false,
            keep_prob: 0.8,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(GiktError::Config(m));
        if self.embed_dim == 0 {
            return err("embed_dim must be positive".into());
        }
        match self.lstm_sizes.last() {
            None => return err("lstm_sizes must name at least one layer".into()),
            Some(&last) if last != self.embed_dim => {
                return err(format!(
                    "last LSTM size {last} must equal embed_dim {} so states interact with embeddings",
                    self.embed_dim
                ))
            }
            _ => {}
        }
        if self.lstm_sizes.contains(&0) {
            return err("LSTM sizes must be positive".into());
        }
        if !(self.keep_prob > 0.0 && self.keep_prob <= 1.0) {
            return err(format!("keep_prob must be in (0, 1], got {}", self.keep_prob));
        }
        if !(-1.0..=1.0).contains(&self.recap_v) {
            return err(format!("recap_v must be in [-1, 1], got {}", self.recap_v));
        }
        self.gcn.validate()
    }
}
