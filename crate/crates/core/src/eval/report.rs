use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GiktError, Result};
use crate::model::RecapMode;
use crate::training::{EpochMetrics, TrainConfig};

pub const REPORT_FORMAT: &str = "gikt-report";

/// Named model variants: component removals and recap designs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "GIKT")]
    Gikt,
    /// No recap and no related skills.
    #[serde(rename = "GIKT-RHS")]
    Rhs,
    /// No recap.
    #[serde(rename = "GIKT-RH")]
    Rh,
    /// No related skills.
    #[serde(rename = "GIKT-RS")]
    Rs,
    /// Uniform pair weights.
    #[serde(rename = "GIKT-RA")]
    Ra,
    #[serde(rename = "GIKT-HE")]
    He,
    #[serde(rename = "GIKT-SE")]
    Se,
    #[serde(rename = "GIKT-HS")]
    Hs,
    #[serde(rename = "GIKT-SS")]
    Ss,
    /// Caller-supplied configuration without overrides.
    #[serde(rename = "custom")]
    Custom,
}

impl Variant {
    pub const ALL: [Variant; 10] = [
        Variant::Gikt,
        Variant::Rhs,
        Variant::Rh,
        Variant::Rs,
        Variant::Ra,
        Variant::He,
        Variant::Se,
        Variant::Hs,
        Variant::Ss,
        Variant::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Gikt => "GIKT",
            Variant::Rhs => "GIKT-RHS",
            Variant::Rh => "GIKT-RH",
            Variant::Rs => "GIKT-RS",
            Variant::Ra => "GIKT-RA",
            Variant::He => "GIKT-HE",
            Variant::Se => "GIKT-SE",
            Variant::Hs => "GIKT-HS",
            Variant::Ss => "GIKT-SS",
            Variant::Custom => "custom",
        }
    }

    /// Copy of `base` with this variant's overrides applied.
    pub fn apply(self, base: &TrainConfig) -> TrainConfig {
        let mut c = base.clone();
        let m = &mut c.model;
        match self {
            Variant::Gikt | Variant::Custom => {}
            Variant::Rhs => {
                m.recap_k = 0;
                m.skills_in_interaction = 0;
            }
            Variant::Rh => m.recap_k = 0,
            Variant::Rs => m.skills_in_interaction = 0,
            Variant::Ra => m.uniform_attention = true,
            Variant::He => m.recap_mode = RecapMode::HardExercise,
            Variant::Se => m.recap_mode = RecapMode::SoftExercise,
            Variant::Hs => m.recap_mode = RecapMode::HardState,
            Variant::Ss => m.recap_mode = RecapMode::SoftState,
        }
        c
    }

    pub fn valid_names() -> String {
        Variant::ALL.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = GiktError;

    /// Accepts the full name or the bare suffix, case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("GIKT-").unwrap_or(&t);
        Variant::ALL
            .iter()
            .copied()
            .find(|v| {
                let n = v.name().to_ascii_uppercase();
                n == t || n.strip_prefix("GIKT-") == Some(t)
            })
            .ok_or_else(|| {
                GiktError::Usage(format!(
                    "unknown variant {s:?}; valid variants: {}",
                    Variant::valid_names()
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format: String,
    pub dataset: String,
    pub variant: Variant,
    /// Short run label, unique within a sweep.
    pub label: String,
    pub config: TrainConfig,
    pub seed: u64,
    pub test_auc: f64,
    pub per_student_auc: Option<f64>,
    pub predictions: usize,
    pub best_epoch: usize,
    pub history: Vec<EpochMetrics>,
}

impl EvalReport {
    /// Reports compare equal on content that is reproducible across runs.
    pub fn without_timing(&self) -> EvalReport {
        let mut r = self.clone();
        r.history.iter_mut().for_each(|m| m.wall_seconds = 0.0);
        r
    }

    pub fn file_name(&self) -> String {
        let safe: String = self
            .label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
            .collect();
        format!("report_{safe}.json")
    }
}

pub fn write_report(report: &EvalReport, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| GiktError::io(dir, e))?;
    let path = dir.join(report.file_name());
    let text = serde_json::to_string_pretty(report)?;
    fs::write(&path, text + "\n").map_err(|e| GiktError::io(&path, e))?;
    Ok(path)
}

pub fn read_report(path: &Path) -> Result<EvalReport> {
    let text = fs::read_to_string(path).map_err(|e| GiktError::io(path, e))?;
    let r: EvalReport = serde_json::from_str(&text)?;
    if r.format != REPORT_FORMAT {
        return Err(GiktError::Load(format!(
            "{} is not a report file (format {:?})",
            path.display(),
            r.format
        )));
    }
    Ok(r)
}

/// Tab-separated index of a sweep in the given order.
pub fn write_index(reports: &[EvalReport], path: &Path) -> Result<()> {
    let mut text = String::from("rank\tlabel\tvariant\ttest_auc\tpredictions\tbest_epoch\tfile\n");
    for (i, r) in reports.iter().enumerate() {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            r.label,
            r.variant,
            r.test_auc,
            r.predictions,
            r.best_epoch,
            r.file_name()
        ));
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| GiktError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| GiktError::io(path, e))
}
