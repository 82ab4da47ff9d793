//! Straight-line reference implementations written without the tape.

use std::collections::BTreeSet;

use gikt::graph::NeighborTable;

pub type Matrix = Vec<Vec<f64>>;

pub fn to_matrix(t: &gikt::numerics::Tensor) -> Matrix {
    (0..t.rows()).map(|i| t.row(i).to_vec()).collect()
}

fn vec_mat(x: &[f64], w: &Matrix) -> Vec<f64> {
    let cols = w[0].len();
    let mut out = vec![0.0; cols];
    for (xi, row) in x.iter().zip(w) {
        for (o, wij) in out.iter_mut().zip(row) {
            *o += xi * wij;
        }
    }
    out
}

/// Per-node graph convolution: each output row is computed independently.
pub fn gcn_node_loop(
    own: &Matrix,
    other: &Matrix,
    table: &[usize],
    width: usize,
    w: &Matrix,
    b: &[f64],
    over_width: bool,
) -> Matrix {
    let denom = if over_width { width } else { width + 1 } as f64;
    own.iter()
        .enumerate()
        .map(|(i, x)| {
            let mut acc = vec_mat(x, w);
            for &j in &table[i * width..(i + 1) * width] {
                for (a, v) in acc.iter_mut().zip(vec_mat(&other[j], w)) {
                    *a += v;
                }
            }
            acc.iter()
                .zip(b)
                .map(|(a, bb)| (a / denom + bb).max(0.0))
                .collect()
        })
        .collect()
}

/// Alternating two-type propagation with shared per-layer weights.
pub fn propagate_node_loop(
    eq: &Matrix,
    es: &Matrix,
    table: &NeighborTable,
    layers: &[(Matrix, Vec<f64>)],
    over_width: bool,
) -> (Matrix, Matrix) {
    let (mut q, mut s) = (eq.clone(), es.clone());
    for (w, b) in layers {
        let nq = gcn_node_loop(&q, &s, &table.question_rows, table.question_width, w, b, over_width);
        let ns = gcn_node_loop(&s, &q, &table.skill_rows, table.skill_width, w, b, over_width);
        q = nq;
        s = ns;
    }
    (q, s)
}

/// Hard recap by definition: same skill set, most recent `k`, ascending.
pub fn hard_recap_oracle(history: &[usize], target: usize, skills: &[BTreeSet<usize>], k: usize) -> Vec<usize> {
    let matches: Vec<usize> = (0..history.len())
        .filter(|&i| skills[history[i]] == skills[target])
        .collect();
    matches[matches.len().saturating_sub(k)..].to_vec()
}

/// Soft selection by sorting: descending score, later index first among ties,
/// first `k`, then filtered by the bound.
pub fn soft_recap_oracle(scores: &[f64], k: usize, v: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap()
            .then(b.cmp(&a))
    });
    let mut out: Vec<usize> = idx.into_iter().take(k).filter(|&i| scores[i] >= v).collect();
    out.sort_unstable();
    out
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Plain-loop LSTM step matching the gate wiring of the model.
pub struct LstmOracle {
    pub w_input: Matrix,
    pub w_forget: Matrix,
    pub w_output: Matrix,
    pub w_cell: Matrix,
    pub b_input: Vec<f64>,
    pub b_forget: Vec<f64>,
    pub b_output: Vec<f64>,
    pub b_cell: Vec<f64>,
}

impl LstmOracle {
    pub fn step(&self, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let gate_in: Vec<f64> = x.iter().chain(h).chain(c).copied().collect();
        let cand_in: Vec<f64> = x.iter().chain(h).copied().collect();
        let affine = |v: &[f64], w: &Matrix, b: &[f64]| -> Vec<f64> {
            vec_mat(v, w).iter().zip(b).map(|(a, bb)| a + bb).collect()
        };
        let i: Vec<f64> = affine(&gate_in, &self.w_input, &self.b_input).into_iter().map(sigmoid).collect();
        let f: Vec<f64> = affine(&gate_in, &self.w_forget, &self.b_forget).into_iter().map(sigmoid).collect();
        let o: Vec<f64> = affine(&gate_in, &self.w_output, &self.b_output).into_iter().map(sigmoid).collect();
        let g: Vec<f64> = affine(&cand_in, &self.w_cell, &self.b_cell).into_iter().map(f64::tanh).collect();
        let c_new: Vec<f64> = (0..c.len()).map(|j| f[j] * c[j] + i[j] * g[j]).collect();
        let h_new = (0..c.len()).map(|j| o[j] * c_new[j].tanh()).collect();
        (h_new, c_new)
    }
}

/// Pairwise count over all positive/negative pairs with ties as one half.
pub fn auc_pairwise(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                num += 1.0;
            } else if si == sj {
                num += 0.5;
            }
        }
    }
    num / pairs
}
