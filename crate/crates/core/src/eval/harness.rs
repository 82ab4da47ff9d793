use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::auc::{auc, per_student_auc};
use super::report::{EvalReport, Variant, REPORT_FORMAT};
use crate::data::{split_train_test, Dataset};
use crate::error::{GiktError, Result};
use crate::graph::RelationGraph;
use crate::model::GiktParams;
use crate::training::{predict, prediction_pairs, train, TrainConfig};

/// Pooled test AUC, optional per-sequence AUC and prediction count.
pub fn evaluate(
    params: &GiktParams,
    graph: &RelationGraph,
    test: &Dataset,
    config: &TrainConfig,
    per_student: bool,
) -> Result<(f64, Option<f64>, usize)> {
    let preds = predict(params, graph, test, config)?;
    let (scores, labels) = prediction_pairs(&preds);
    let pooled = auc(&scores, &labels)?;
    let student = if per_student {
        Some(per_student_auc(&preds)?)
    } else {
        None
    };
    Ok((pooled, student, scores.len()))
}

/// Split, train with the variant's overrides and score the best epoch.
pub fn run_variant(dataset: &Dataset, base: &TrainConfig, variant: Variant) -> Result<EvalReport> {
    run_with_label(dataset, &variant.apply(base), variant, variant.name(), false)
}

/// [`run_variant`] for a config that already has its overrides applied.
pub fn run_with_label(
    dataset: &Dataset,
    config: &TrainConfig,
    variant: Variant,
    label: &str,
    per_student: bool,
) -> Result<EvalReport> {
    config.validate()?;
    let (train_set, test_set) = split_train_test(dataset, config.train_ratio, config.seed)?;
    let outcome = train(&train_set, &test_set, config, |_| {})?;
    let graph = crate::graph::build_graph(&train_set)?;
    let (test_auc, student, predictions) = evaluate(&outcome.best, &graph, &test_set, config, per_student)?;
    Ok(EvalReport {
        format: REPORT_FORMAT.into(),
        dataset: dataset.name.clone(),
        variant,
        label: label.into(),
        config: config.clone(),
        seed: config.seed,
        test_auc,
        per_student_auc: student,
        predictions,
        best_epoch: outcome.best_epoch,
        history: outcome.history,
    })
}

/// Hyperparameters a grid may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKnob {
    /// Sampled question neighbors of each skill.
    QuestionNeighbors,
    /// Sampled skill neighbors of each question.
    SkillNeighbors,
    RecapK,
    SkillsInInteraction,
    GcnLayers,
}

impl GridKnob {
    pub fn name(self) -> &'static str {
        match self {
            GridKnob::QuestionNeighbors => "n_q",
            GridKnob::SkillNeighbors => "n_s",
            GridKnob::RecapK => "recap_k",
            GridKnob::SkillsInInteraction => "skills_in_interaction",
            GridKnob::GcnLayers => "gcn_layers",
        }
    }

    fn set(self, config: &mut TrainConfig, value: usize) {
        let m = &mut config.model;
        match self {
            GridKnob::QuestionNeighbors => m.gcn.n_q = value,
            GridKnob::SkillNeighbors => m.gcn.n_s = value,
            GridKnob::RecapK => m.recap_k = value,
            GridKnob::SkillsInInteraction => m.skills_in_interaction = value,
            GridKnob::GcnLayers => m.gcn.layers = value,
        }
    }
}

impl fmt::Display for GridKnob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridKnob {
    type Err = GiktError;

    fn from_str(s: &str) -> Result<Self> {
        [
            GridKnob::QuestionNeighbors,
            GridKnob::SkillNeighbors,
            GridKnob::RecapK,
            GridKnob::SkillsInInteraction,
            GridKnob::GcnLayers,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            GiktError::Config(format!(
                "unknown grid knob {s:?} (n_q, n_s, recap_k, skills_in_interaction, gcn_layers)"
            ))
        })
    }
}

/// Finite value lists per knob; the grid is their cartesian product.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<(GridKnob, Vec<usize>)>,
}

impl GridSpec {
    pub fn with(mut self, knob: GridKnob, values: Vec<usize>) -> Self {
        self.axes.push((knob, values));
        self
    }

    /// Every grid point as `(knob, value)` assignments, last axis fastest.
    pub fn points(&self) -> Result<Vec<Vec<(GridKnob, usize)>>> {
        if self.axes.is_empty() || self.axes.iter().any(|(_, v)| v.is_empty()) {
            return Err(GiktError::Config("grid has no points".into()));
        }
        let mut points = vec![Vec::new()];
        for (knob, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push((*knob, v));
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

/// One seeded run per grid point, ranked by descending test AUC.
/// `on_report` sees each report as soon as it finishes.
pub fn grid_search(
    dataset: &Dataset,
    base: &TrainConfig,
    grid: &GridSpec,
    mut on_report: impl FnMut(&EvalReport) -> Result<()>,
) -> Result<Vec<EvalReport>> {
    let points = grid.points()?;
    let mut reports = Vec::with_capacity(points.len());
    for point in points {
        let mut config = base.clone();
        for &(knob, value) in &point {
            knob.set(&mut config, value);
        }
        let label = point
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        let report = run_with_label(dataset, &config, Variant::Custom, &label, false)?;
        on_report(&report)?;
        reports.push(report);
    }
    // Stable sort keeps enumeration order among equal AUCs.
    reports.sort_by(|a, b| b.test_auc.total_cmp(&a.test_auc));
    Ok(reports)
}
