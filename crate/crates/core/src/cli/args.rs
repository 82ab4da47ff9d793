use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::commands::{cmd_ablate, cmd_eval, cmd_grid, cmd_prepare, cmd_train, stats_path, AblationPlan};
use super::RunConfig;
use crate::data::FormatSpec;
use crate::error::{GiktError, Result};
use crate::eval::{GridKnob, GridSpec, Variant};

#[derive(Debug, Parser)]
#[command(name = "gikt", version, about = "Knowledge tracing over a question-skill graph")]
pub struct Cli {
    /// Flat key = value run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override one config key, e.g. `--set epochs=20`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a raw interaction log into a dataset file.
    Prepare {
        raw: PathBuf,
        /// Column mapping file; defaults to comma-separated
        /// student,question,skill,correct,order columns.
        #[arg(long)]
        format: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and keep the best checkpoint.
    Train { dataset: Option<PathBuf> },
    /// Score a checkpoint on its test split.
    Eval {
        dataset: Option<PathBuf>,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Run named variants or a GCN depth sweep.
    Ablate {
        dataset: Option<PathBuf>,
        /// Comma-separated variant names, e.g. RHS,RH,RS,RA.
        #[arg(long, value_delimiter = ',', conflicts_with = "layers")]
        variants: Vec<String>,
        /// Comma-separated GCN depths, e.g. 0,1,2,3.
        #[arg(long, value_delimiter = ',')]
        layers: Vec<usize>,
    },
    /// Cartesian hyperparameter sweep.
    Grid {
        dataset: Option<PathBuf>,
        /// `knob=v1,v2,...` with knob one of n_q, n_s, recap_k,
        /// skills_in_interaction, gcn_layers. Repeatable.
        #[arg(long = "axis", value_name = "KNOB=VALUES")]
        axes: Vec<String>,
    },
}

impl Cli {
    /// Config file, then `--set` overrides, then the dedicated flags.
    pub fn resolve_config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            c.apply_assignment(o)?;
        }
        if let Some(s) = self.seed {
            c.train.seed = s;
        }
        if let Some(d) = &self.out_dir {
            c.out_dir = d.clone();
        }
        if let Some(t) = self.threads {
            c.train.threads = t;
        }
        Ok(c)
    }
}

fn parse_axis(text: &str) -> Result<(GridKnob, Vec<usize>)> {
    let (k, vs) = text
        .split_once('=')
        .ok_or_else(|| GiktError::Usage(format!("expected knob=v1,v2, got {text:?}")))?;
    let values = vs
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| GiktError::Usage(format!("invalid grid value {v:?} in {text:?}")))
        })
        .collect::<Result<_>>()?;
    Ok((k.trim().parse()?, values))
}

/// Execute one parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let config = cli.resolve_config()?;
    match &cli.command {
        Command::Prepare { raw, format, out } => {
            let spec = match format {
                Some(p) => FormatSpec::load(p)?,
                None => FormatSpec::default(),
            };
            let (dataset, report) = cmd_prepare(raw, &spec, out)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            eprintln!("{}", dataset.stats());
            eprintln!("wrote {} and {}", out.display(), stats_path(out).display());
        }
        Command::Train { dataset } => {
            let a = cmd_train(dataset.as_deref(), &config)?;
            eprintln!(
                "best test AUC {:.4} at epoch {}; wrote {}",
                a.best_auc,
                a.best_epoch,
                a.checkpoint.display()
            );
        }
        Command::Eval { dataset, checkpoint } => {
            let r = cmd_eval(dataset.as_deref(), checkpoint, &config)?;
            eprintln!("test AUC {:.4} over {} predictions", r.test_auc, r.predictions);
        }
        Command::Ablate { dataset, variants, layers } => {
            let plan = if !variants.is_empty() {
                AblationPlan::Variants(variants.iter().map(|v| v.parse()).collect::<Result<Vec<Variant>>>()?)
            } else if !layers.is_empty() {
                AblationPlan::Layers(layers.clone())
            } else {
                return Err(GiktError::Usage(format!(
                    "give --variants (valid: {}) or --layers",
                    Variant::valid_names()
                )));
            };
            for r in cmd_ablate(dataset.as_deref(), &config, &plan)? {
                eprintln!("{}\t{:.4}", r.label, r.test_auc);
            }
        }
        Command::Grid { dataset, axes } => {
            let mut grid = GridSpec::default();
            for a in axes {
                let (k, v) = parse_axis(a)?;
                grid = grid.with(k, v);
            }
            for r in cmd_grid(dataset.as_deref(), &config, &grid)? {
                eprintln!("{}\t{:.4}", r.label, r.test_auc);
            }
        }
    }
    Ok(())
}

/// Parse arguments, run, and map the outcome to a process exit code:
/// 0 on success, 2 for usage errors, 1 otherwise.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, GiktError::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
