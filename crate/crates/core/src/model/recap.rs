//! History recap: which earlier timesteps are recalled for the target question.
//!
//! Selection is discrete and carries no gradient; the selected timesteps are
//! later turned into exercise or hidden-state rows on the tape.

use serde::{Deserialize, Serialize};

use super::RecapMode;
use crate::graph::RelationGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecapSelection {
    pub mode: RecapMode,
    /// Selected history timesteps, ascending.
    pub timesteps: Vec<usize>,
    /// Similarity of each selected timestep (soft modes only), aligned with `timesteps`.
    pub scores: Vec<f64>,
}

impl RecapSelection {
    pub fn len(&self) -> usize {
        self.timesteps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timesteps.is_empty()
    }
}

/// Timesteps whose question has exactly the target's skill set, keeping the
/// `k` most recent.
pub fn recap_hard(history: &[usize], target: usize, graph: &RelationGraph, k: usize) -> Vec<usize> {
    let want = &graph.question_neighbors[target];
    let mut picked: Vec<usize> = history
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &q)| graph.question_neighbors[q] == *want)
        .map(|(i, _)| i)
        .take(k)
        .collect();
    picked.reverse();
    picked
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else if a == b {
        1.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Indices ranked `≤ k` by score (ties favour the later index) that also
/// reach the bound `v`, ascending.
pub fn top_k_above(scores: &[f64], k: usize, v: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(b.cmp(&a)));
    let mut picked: Vec<usize> = order.into_iter().take(k).filter(|&i| scores[i] >= v).collect();
    picked.sort_unstable();
    picked
}

/// Score every history entry by cosine similarity to the target embedding.
pub fn recap_soft(history: &[&[f64]], target: &[f64], k: usize, v: f64) -> (Vec<usize>, Vec<f64>) {
    let scores: Vec<f64> = history.iter().map(|h| cosine(h, target)).collect();
    let picked = top_k_above(&scores, k, v);
    let chosen = picked.iter().map(|&i| scores[i]).collect();
    (picked, chosen)
}
