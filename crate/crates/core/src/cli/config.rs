use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{GiktError, Result};
use crate::training::TrainConfig;

/// Everything a command needs, read from a flat `key = value` file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub dataset: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Also report the mean of per-sequence AUCs.
    pub per_student_auc: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: TrainConfig::default(),
            dataset: None,
            out_dir: PathBuf::from("out"),
            per_student_auc: false,
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| GiktError::Config(format!("invalid value {v:?} for {key}")))
}

fn flag(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(GiktError::Config(format!("invalid boolean {v:?} for {key}"))),
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 28] = [
        "dataset",
        "out_dir",
        "per_student_auc",
        "seed",
        "epochs",
        "patience",
        "batch_size",
        "learning_rate",
        "inference_runs",
        "max_len",
        "train_ratio",
        "sum_loss",
        "clip_norm",
        "threads",
        "embed_dim",
        "lstm_sizes",
        "keep_prob",
        "gcn_layers",
        "n_q",
        "n_s",
        "mean_over_width",
        "per_type_weights",
        "recap_mode",
        "recap_k",
        "recap_v",
        "recap_on_raw_embeddings",
        "skills_in_interaction",
        "uniform_attention",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let t = &mut self.train;
        let m = &mut t.model;
        match key {
            "dataset" => self.dataset = (!v.is_empty()).then(|| PathBuf::from(v)),
            "out_dir" => self.out_dir = PathBuf::from(v),
            "per_student_auc" => self.per_student_auc = flag(key, v)?,
            "seed" => t.seed = num(key, v)?,
            "epochs" => t.epochs = num(key, v)?,
            "patience" => t.patience = num(key, v)?,
            "batch_size" => t.batch_size = num(key, v)?,
            "learning_rate" => t.learning_rate = num(key, v)?,
            "inference_runs" => t.inference_runs = num(key, v)?,
            "max_len" => t.max_len = num(key, v)?,
            "train_ratio" => t.train_ratio = num(key, v)?,
            "sum_loss" => t.sum_loss = flag(key, v)?,
            "clip_norm" => t.clip_norm = if v == "none" { None } else { Some(num(key, v)?) },
            "threads" => t.threads = num(key, v)?,
            "embed_dim" => m.embed_dim = num(key, v)?,
            "lstm_sizes" => {
                m.lstm_sizes = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "keep_prob" => m.keep_prob = num(key, v)?,
            "gcn_layers" => m.gcn.layers = num(key, v)?,
            "n_q" => m.gcn.n_q = num(key, v)?,
            "n_s" => m.gcn.n_s = num(key, v)?,
            "mean_over_width" => m.gcn.mean_over_width = flag(key, v)?,
            "per_type_weights" => m.gcn.per_type_weights = flag(key, v)?,
            "recap_mode" => m.recap_mode = v.parse()?,
            "recap_k" => m.recap_k = num(key, v)?,
            "recap_v" => m.recap_v = num(key, v)?,
            "recap_on_raw_embeddings" => m.recap_on_raw_embeddings = flag(key, v)?,
            "skills_in_interaction" => m.skills_in_interaction = num(key, v)?,
            "uniform_attention" => m.uniform_attention = flag(key, v)?,
            other => {
                return Err(GiktError::Config(format!(
                    "unknown config key {other:?}; known keys: {}",
                    Self::KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                GiktError::Config(format!("line {}: expected key = value, got {line:?}", i + 1))
            })?;
            self.set(k.trim(), v)
                .map_err(|e| GiktError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| GiktError::io(path, e))?;
        RunConfig::parse(&text)
    }

    /// `key=value` override as given on the command line.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| GiktError::Usage(format!("expected key=value, got {assignment:?}")))?;
        self.set(k.trim(), v)
    }

    /// Every key with its resolved value, in a fixed order.
    pub fn to_text(&self) -> String {
        let t = &self.train;
        let m = &t.model;
        let b = |x: bool| x.to_string();
        let values: Vec<(&str, String)> = vec![
            ("dataset", self.dataset.as_ref().map(|p| p.display().to_string()).unwrap_or_default()),
            ("out_dir", self.out_dir.display().to_string()),
            ("per_student_auc", b(self.per_student_auc)),
            ("seed", t.seed.to_string()),
            ("epochs", t.epochs.to_string()),
            ("patience", t.patience.to_string()),
            ("batch_size", t.batch_size.to_string()),
            ("learning_rate", t.learning_rate.to_string()),
            ("inference_runs", t.inference_runs.to_string()),
            ("max_len", t.max_len.to_string()),
            ("train_ratio", t.train_ratio.to_string()),
            ("sum_loss", b(t.sum_loss)),
            ("clip_norm", t.clip_norm.map_or("none".into(), |c| c.to_string())),
            ("threads", t.threads.to_string()),
            ("embed_dim", m.embed_dim.to_string()),
            (
                "lstm_sizes",
                m.lstm_sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            ),
            ("keep_prob", m.keep_prob.to_string()),
            ("gcn_layers", m.gcn.layers.to_string()),
            ("n_q", m.gcn.n_q.to_string()),
            ("n_s", m.gcn.n_s.to_string()),
            ("mean_over_width", b(m.gcn.mean_over_width)),
            ("per_type_weights", b(m.gcn.per_type_weights)),
            ("recap_mode", m.recap_mode.to_string()),
            ("recap_k", m.recap_k.to_string()),
            ("recap_v", m.recap_v.to_string()),
            ("recap_on_raw_embeddings", b(m.recap_on_raw_embeddings)),
            ("skills_in_interaction", m.skills_in_interaction.to_string()),
            ("uniform_attention", b(m.uniform_attention)),
        ];
        let mut out = String::new();
        for (k, v) in values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()
    }
}
