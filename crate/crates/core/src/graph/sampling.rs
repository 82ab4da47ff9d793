use rand::seq::index;
use rand::Rng as _;

use super::RelationGraph;
use crate::rng::{self, Rng};

/// Fixed-width sampled neighbor ids, stored flat and row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborTable {
    /// Skill neighbors per question (`n_s` wide).
    pub question_width: usize,
    /// Question neighbors per skill (`n_q` wide).
    pub skill_width: usize,
    pub question_rows: Vec<usize>,
    pub skill_rows: Vec<usize>,
    pub seed: u64,
}

impl NeighborTable {
    pub fn question_row(&self, q: usize) -> &[usize] {
        &self.question_rows[q * self.question_width..(q + 1) * self.question_width]
    }

    pub fn skill_row(&self, s: usize) -> &[usize] {
        &self.skill_rows[s * self.skill_width..(s + 1) * self.skill_width]
    }
}

/// Sample `width` ids from `neighbors`: distinct when the degree allows it,
/// otherwise every neighbor once plus uniform draws with replacement.
/// The row is returned sorted so identical samples aggregate identically.
pub fn sample_row(neighbors: &[usize], width: usize, rng: &mut Rng) -> Vec<usize> {
    let degree = neighbors.len();
    let mut row: Vec<usize> = if degree >= width {
        index::sample(rng, degree, width).into_iter().map(|i| neighbors[i]).collect()
    } else {
        let mut r = neighbors.to_vec();
        r.extend((degree..width).map(|_| neighbors[rng.gen_range(0..degree)]));
        r
    };
    row.sort_unstable();
    row
}

/// `n_q` question neighbors per skill and `n_s` skill neighbors per question.
pub fn sample_neighbors(graph: &RelationGraph, n_q: usize, n_s: usize, seed: u64) -> NeighborTable {
    let (n_q, n_s) = (n_q.max(1), n_s.max(1));
    let mut r = rng::stream(seed, "neighbors", &[]);
    let question_rows = graph
        .question_neighbors
        .iter()
        .flat_map(|ns| sample_row(ns, n_s, &mut r))
        .collect();
    let skill_rows = graph
        .skill_neighbors
        .iter()
        .flat_map(|ns| sample_row(ns, n_q, &mut r))
        .collect();
    NeighborTable {
        question_width: n_s,
        skill_width: n_q,
        question_rows,
        skill_rows,
        seed,
    }
}
