//! Oracle comparisons shared by the property suites and the acceptance run.

use std::collections::BTreeSet;

use gikt::graph::{gcn_layer, propagate, sample_neighbors, GcnLayerVars, RelationGraph};
use gikt::model::{recap_hard, top_k_above};
use gikt::numerics::{Tape, Tensor};
use gikt::rng::Rng;
use rand::Rng as _;

use super::oracles::{gcn_node_loop, hard_recap_oracle, propagate_node_loop, soft_recap_oracle, to_matrix};
use super::{random_question_skills, random_tensor, rng};

fn max_diff(a: &[Vec<f64>], b: &Tensor) -> f64 {
    a.iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().zip(b.row(i)).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Random bipartite graph with at most 10 nodes in total.
pub fn small_graph(r: &mut Rng) -> (Vec<Vec<usize>>, usize) {
    let skills = r.gen_range(1..=4);
    let questions = r.gen_range(skills..=10 - skills);
    (random_question_skills(r, questions, skills, 3), skills)
}

/// Largest deviation of one random graph convolution from the node loop.
pub fn gcn_layer_error(case: u64) -> f64 {
    let mut r = rng(case);
    let (qs, s) = small_graph(&mut r);
    let graph = RelationGraph::from_question_skills(&qs, s).unwrap();
    let (n_q, n_s) = (r.gen_range(1..5), r.gen_range(1..5));
    let table = sample_neighbors(&graph, n_q, n_s, case);
    let d = r.gen_range(1..6);
    let over_width = r.gen_bool(0.5);
    let (eq, es) = (random_tensor(&mut r, &[qs.len(), d], 1.0), random_tensor(&mut r, &[s, d], 1.0));
    let (w, b) = (random_tensor(&mut r, &[d, d], 1.0), random_tensor(&mut r, &[d], 0.5));

    let mut tape = Tape::new();
    let (vq, vs, vw, vb) = (tape.constant(eq.clone()), tape.constant(es.clone()), tape.constant(w.clone()), tape.constant(b.clone()));
    let out = gcn_layer(&mut tape, vq, vs, &table.question_rows, table.question_width, vw, vb, over_width).unwrap();
    let oracle = gcn_node_loop(&to_matrix(&eq), &to_matrix(&es), &table.question_rows, n_s, &to_matrix(&w), b.data(), over_width);
    max_diff(&oracle, tape.value(out))
}

/// Largest deviation of a random multi-layer propagation from the node loop.
/// With no layers the outputs must also be the inputs, bit for bit.
pub fn propagate_error(case: u64, n_layers: usize) -> f64 {
    let mut r = rng(1000 + case);
    let (qs, s) = small_graph(&mut r);
    let graph = RelationGraph::from_question_skills(&qs, s).unwrap();
    let table = sample_neighbors(&graph, r.gen_range(1..5), r.gen_range(1..5), case);
    let d = r.gen_range(1..5);
    let over_width = r.gen_bool(0.3);
    let (eq, es) = (random_tensor(&mut r, &[qs.len(), d], 1.0), random_tensor(&mut r, &[s, d], 1.0));
    let weights: Vec<(Tensor, Tensor)> = (0..n_layers)
        .map(|_| (random_tensor(&mut r, &[d, d], 1.0), random_tensor(&mut r, &[d], 0.5)))
        .collect();

    let mut tape = Tape::new();
    let (vq, vs) = (tape.constant(eq.clone()), tape.constant(es.clone()));
    let layers: Vec<GcnLayerVars> = weights
        .iter()
        .map(|(w, b)| {
            let (w, b) = (tape.constant(w.clone()), tape.constant(b.clone()));
            GcnLayerVars { w_question: w, b_question: b, w_skill: w, b_skill: b }
        })
        .collect();
    let agg = propagate(&mut tape, vq, vs, &table, &layers, over_width).unwrap();
    if n_layers == 0 && (tape.value(agg.q_tilde) != &eq || tape.value(agg.s_tilde) != &es) {
        return f64::INFINITY;
    }
    let ow: Vec<_> = weights.iter().map(|(w, b)| (to_matrix(w), b.data().to_vec())).collect();
    let (oq, os) = propagate_node_loop(&to_matrix(&eq), &to_matrix(&es), &table, &ow, over_width);
    max_diff(&oq, tape.value(agg.q_tilde)).max(max_diff(&os, tape.value(agg.s_tilde)))
}

/// Every history of length 0..=max over the alphabet `0..base`.
pub fn for_each_history(base: usize, max: usize, mut f: impl FnMut(&[usize])) {
    for len in 0..=max {
        let mut h = vec![0; len];
        loop {
            f(&h);
            let mut i = 0;
            while i < len && h[i] == base - 1 {
                h[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            h[i] += 1;
        }
    }
}

/// Hard selection against the set-equality definition on every history of
/// length ≤ `max_len`. History questions q0..q2 cover three skills; q0 and q1
/// share a skill set. q3 and q4 only appear as targets.
/// Returns `(comparisons, mismatches)`.
pub fn hard_recap_exhaustive(max_len: usize) -> (u64, u64) {
    let qs = vec![vec![0], vec![0], vec![1, 2], vec![2], vec![0, 1, 2]];
    let sets: Vec<BTreeSet<usize>> = qs.iter().map(|s| s.iter().copied().collect()).collect();
    let graph = RelationGraph::from_question_skills(&qs, 3).unwrap();
    let (mut checked, mut bad) = (0, 0);
    for_each_history(3, max_len, |h| {
        for target in 0..qs.len() {
            for k in [0, 1, 3, 12] {
                checked += 1;
                if recap_hard(h, target, &graph, k) != hard_recap_oracle(h, target, &sets, k) {
                    bad += 1;
                }
            }
        }
    });
    (checked, bad)
}

/// Soft selection against sort-and-filter for every `k` and a bound grid that
/// includes each score itself. Returns `(comparisons, mismatches)`.
pub fn soft_recap_case(case: u64) -> (u64, u64) {
    let mut r = rng(case);
    let n = r.gen_range(0..15);
    // Coarse values so ties with each other and with the bound occur.
    let scores: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(-4..=4)) / 4.0).collect();
    let mut bounds = scores.clone();
    bounds.extend([-1.0, -0.3, 0.0, 0.6, 1.0]);
    let (mut checked, mut bad) = (0, 0);
    for k in 0..=n + 1 {
        for &v in &bounds {
            checked += 1;
            if top_k_above(&scores, k, v) != soft_recap_oracle(&scores, k, v) {
                bad += 1;
            }
        }
    }
    (checked, bad)
}

/// Scores on a coarse grid so ties are common; both classes present.
pub fn auc_draw(r: &mut Rng) -> (Vec<f64>, Vec<u8>) {
    let n = r.gen_range(2..80);
    let levels = r.gen_range(1..12);
    let mut labels: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    let scores = (0..n).map(|_| f64::from(r.gen_range(0..levels)) / levels as f64).collect();
    (scores, labels)
}
