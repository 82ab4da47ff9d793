use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::RunConfig;
use crate::data::{build_sequences, load_dataset, parse_log, save_dataset, split_train_test, Dataset, FormatSpec, ParseReport};
use crate::error::{GiktError, Result};
use crate::eval::{evaluate, grid_search, run_with_label, write_index, write_report, EvalReport, GridSpec, Variant, REPORT_FORMAT};
use crate::graph::build_graph;
use crate::model::{load_checkpoint, save_checkpoint, Checkpoint};
use crate::training::{train, TrainConfig, METRICS_HEADER};

pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const METRICS_FILE: &str = "metrics.tsv";
pub const CONFIG_FILE: &str = "config.txt";
pub const INDEX_FILE: &str = "index.tsv";

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| GiktError::io(dir, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| GiktError::io(path, e))
}

fn write_resolved_config(config: &RunConfig, dataset: &Path) -> Result<()> {
    let mut resolved = config.clone();
    resolved.dataset = Some(dataset.to_path_buf());
    create_dir(&config.out_dir)?;
    write_file(&config.out_dir.join(CONFIG_FILE), &resolved.to_text())
}

/// Path of the statistics summary written beside a prepared dataset.
pub fn stats_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".stats.tsv");
    dataset.with_file_name(name)
}

/// Parse a raw log, build sequences and write the dataset plus its statistics.
pub fn cmd_prepare(raw: &Path, format: &FormatSpec, out: &Path) -> Result<(Dataset, ParseReport)> {
    let (records, report) = parse_log(raw, format)?;
    if records.is_empty() {
        return Err(GiktError::Format(format!("{} contains no interactions", raw.display())));
    }
    let name = raw.file_stem().map_or("dataset".into(), |s| s.to_string_lossy().into_owned());
    let dataset = build_sequences(&name, &records);
    if dataset.sequences.is_empty() {
        return Err(GiktError::EmptySelection(format!(
            "no student in {} has more than 3 interactions",
            raw.display()
        )));
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    save_dataset(&dataset, out)?;
    write_file(&stats_path(out), &format!("{}\n", dataset.stats()))?;
    Ok((dataset, report))
}

fn resolve_dataset(arg: Option<&Path>, config: &RunConfig) -> Result<PathBuf> {
    arg.map(Path::to_path_buf)
        .or_else(|| config.dataset.clone())
        .ok_or_else(|| GiktError::Usage("no dataset given (argument or `dataset` config key)".into()))
}

#[derive(Clone, Debug)]
pub struct TrainArtifacts {
    pub checkpoint: PathBuf,
    pub metrics: PathBuf,
    pub config: PathBuf,
    pub best_epoch: usize,
    pub best_auc: f64,
}

/// Train on the seeded split and write the best checkpoint, the metrics log
/// and the resolved config into `out_dir`.
pub fn cmd_train(dataset: Option<&Path>, config: &RunConfig) -> Result<TrainArtifacts> {
    config.validate()?;
    let path = resolve_dataset(dataset, config)?;
    let data = load_dataset(&path)?;
    let tc = &config.train;
    let (train_set, test_set) = split_train_test(&data, tc.train_ratio, tc.seed)?;
    write_resolved_config(config, &path)?;

    let metrics_path = config.out_dir.join(METRICS_FILE);
    let mut log = fs::File::create(&metrics_path).map_err(|e| GiktError::io(&metrics_path, e))?;
    writeln!(log, "{METRICS_HEADER}").map_err(|e| GiktError::io(&metrics_path, e))?;
    let mut write_err = None;
    let outcome = train(&train_set, &test_set, tc, |m| {
        if write_err.is_none() {
            if let Err(e) = writeln!(log, "{}", m.log_line()).and_then(|_| log.flush()) {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(GiktError::io(&metrics_path, e));
    }

    let checkpoint = config.out_dir.join(CHECKPOINT_FILE);
    let header = serde_json::to_value(tc)?;
    save_checkpoint(&Checkpoint::from_params(&outcome.best, header), &checkpoint)?;
    Ok(TrainArtifacts {
        checkpoint,
        metrics: metrics_path,
        config: config.out_dir.join(CONFIG_FILE),
        best_epoch: outcome.best_epoch,
        best_auc: outcome.best_auc,
    })
}

/// Score a checkpoint on the test split its training run used. Only
/// `threads`, `per_student_auc` and `out_dir` are taken from `config`.
pub fn cmd_eval(dataset: Option<&Path>, checkpoint: &Path, config: &RunConfig) -> Result<EvalReport> {
    let path = resolve_dataset(dataset, config)?;
    let data = load_dataset(&path)?;
    let ckpt = load_checkpoint(checkpoint)?;
    let mut tc: TrainConfig = serde_json::from_value(ckpt.config.clone()).map_err(|e| {
        GiktError::Load(format!("{}: unreadable training config: {e}", checkpoint.display()))
    })?;
    tc.threads = config.train.threads;
    if ckpt.question_count != data.question_count || ckpt.skill_count != data.skill_count {
        return Err(GiktError::Load(format!(
            "checkpoint has {} questions and {} skills, dataset {} has {} and {}",
            ckpt.question_count,
            ckpt.skill_count,
            path.display(),
            data.question_count,
            data.skill_count
        )));
    }
    let params = ckpt.into_params(&tc.model)?;
    let (_, test_set) = split_train_test(&data, tc.train_ratio, tc.seed)?;
    let graph = build_graph(&data)?;
    let (test_auc, per_student, predictions) = evaluate(&params, &graph, &test_set, &tc, config.per_student_auc)?;
    let report = EvalReport {
        format: REPORT_FORMAT.into(),
        dataset: data.name.clone(),
        variant: Variant::Custom,
        label: "eval".into(),
        config: tc.clone(),
        seed: tc.seed,
        test_auc,
        per_student_auc: per_student,
        predictions,
        best_epoch: 0,
        history: Vec::new(),
    };
    write_report(&report, &config.out_dir)?;
    Ok(report)
}

/// What an ablation sweep varies.
#[derive(Clone, Debug, PartialEq)]
pub enum AblationPlan {
    Variants(Vec<Variant>),
    /// GCN depths applied to the base config.
    Layers(Vec<usize>),
}

/// One report per variant or depth, plus an index in run order.
pub fn cmd_ablate(dataset: Option<&Path>, config: &RunConfig, plan: &AblationPlan) -> Result<Vec<EvalReport>> {
    config.validate()?;
    let path = resolve_dataset(dataset, config)?;
    let data = load_dataset(&path)?;
    write_resolved_config(config, &path)?;
    let runs: Vec<(Variant, String, TrainConfig)> = match plan {
        AblationPlan::Variants(vs) if !vs.is_empty() => vs
            .iter()
            .map(|&v| (v, v.name().to_string(), v.apply(&config.train)))
            .collect(),
        AblationPlan::Layers(ls) if !ls.is_empty() => ls
            .iter()
            .map(|&l| {
                let mut c = config.train.clone();
                c.model.gcn.layers = l;
                (Variant::Gikt, format!("GIKT-layers{l}"), c)
            })
            .collect(),
        _ => return Err(GiktError::Usage("ablation needs at least one variant or layer count".into())),
    };
    let mut reports = Vec::with_capacity(runs.len());
    for (variant, label, tc) in runs {
        log::info!("running {label}");
        let r = run_with_label(&data, &tc, variant, &label, config.per_student_auc)?;
        write_report(&r, &config.out_dir)?;
        reports.push(r);
    }
    write_index(&reports, &config.out_dir.join(INDEX_FILE))?;
    Ok(reports)
}

/// Cartesian sweep; reports are written as they finish and the index is ranked.
pub fn cmd_grid(dataset: Option<&Path>, config: &RunConfig, grid: &GridSpec) -> Result<Vec<EvalReport>> {
    config.validate()?;
    grid.points()?;
    let path = resolve_dataset(dataset, config)?;
    let data = load_dataset(&path)?;
    write_resolved_config(config, &path)?;
    let reports = grid_search(&data, &config.train, grid, |r| write_report(r, &config.out_dir).map(|_| ()))?;
    write_index(&reports, &config.out_dir.join(INDEX_FILE))?;
    Ok(reports)
}
