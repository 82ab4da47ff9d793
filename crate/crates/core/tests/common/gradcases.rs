//! One randomized gradient check per differentiable tape operation, plus
//! composite cells and the full model on a 3-step toy batch.

use gikt::data::{Batch, Step};
use gikt::graph::{gcn_layer, propagate, sample_neighbors, GcnLayerVars, RelationGraph};
use gikt::model::{
    encode_exercise, forward_batch, interaction_predict, lstm_layer, lstm_step, sample_batch, GiktParams, LstmLayerVars,
    ModelConfig, PairGroup, RecapMode,
};
use gikt::numerics::{Tape, Tensor, Var};
use gikt::rng::{self, Rng};
use gikt::Result;
use rand::Rng as _;

use super::gradcheck::max_rel_error;
use super::{random_question_skills, random_tensor, tiny_model};

pub type Case = fn(&mut Rng) -> Result<f64>;

/// Contract `x` with fixed random weights so every output entry matters.
fn weighted_sum(tape: &mut Tape, x: Var, seed: u64) -> Result<Var> {
    let shape = tape.value(x).shape().to_vec();
    let w = random_tensor(&mut rng::stream(seed, "weights", &[]), &shape, 1.0);
    let w = tape.constant(w);
    let y = tape.mul(x, w)?;
    Ok(tape.sum(y))
}

fn dims(r: &mut Rng) -> (usize, usize, usize) {
    (r.gen_range(1..5), r.gen_range(1..5), r.gen_range(1..5))
}

/// Entries at least `gap` away from zero, for kinked functions.
fn away_from_zero(r: &mut Rng, shape: &[usize], gap: f64) -> Tensor {
    let mut t = random_tensor(r, shape, 1.0);
    for x in t.data_mut() {
        if x.abs() < gap {
            *x += gap.copysign(*x);
        }
    }
    t
}

fn matmul(r: &mut Rng) -> Result<f64> {
    let (m, k, n) = dims(r);
    let seed = r.gen();
    let inputs = [random_tensor(r, &[m, k], 1.0), random_tensor(r, &[k, n], 1.0)];
    max_rel_error(&inputs, |t, v| {
        let y = t.matmul(v[0], v[1])?;
        weighted_sum(t, y, seed)
    })
}

fn elementwise(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let seed = r.gen();
    let inputs = [random_tensor(r, &[m, n], 1.0), random_tensor(r, &[m, n], 1.0)];
    max_rel_error(&inputs, |t, v| {
        let a = t.add(v[0], v[1])?;
        let s = t.sub(a, v[1])?;
        let p = t.mul(s, v[1])?;
        let q = t.mul(p, a)?;
        weighted_sum(t, q, seed)
    })
}

fn unary(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let seed = r.gen();
    let inputs = [away_from_zero(r, &[m, n], 1e-3)];
    max_rel_error(&inputs, |t, v| {
        let a = t.relu(v[0]);
        let b = t.sigmoid(v[0]);
        let c = t.tanh(v[0]);
        let d = t.scale(c, -1.7);
        let ab = t.add(a, b)?;
        let y = t.add(ab, d)?;
        weighted_sum(t, y, seed)
    })
}

fn add_row(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let seed = r.gen();
    let inputs = [random_tensor(r, &[m, n], 1.0), random_tensor(r, &[n], 1.0)];
    max_rel_error(&inputs, |t, v| {
        let y = t.add_row(v[0], v[1])?;
        weighted_sum(t, y, seed)
    })
}

fn concat(r: &mut Rng) -> Result<f64> {
    let (m, n, k) = dims(r);
    let seed = r.gen();
    let inputs = [
        random_tensor(r, &[m, n], 1.0),
        random_tensor(r, &[m, k], 1.0),
        random_tensor(r, &[k, n], 1.0),
    ];
    max_rel_error(&inputs, |t, v| {
        let wide = t.concat(&[v[0], v[1]], 1)?;
        let tall = t.concat(&[v[0], v[2], v[0]], 0)?;
        let a = weighted_sum(t, wide, seed)?;
        let b = weighted_sum(t, tall, seed + 1)?;
        t.add(a, b)
    })
}

fn softmax(r: &mut Rng) -> Result<f64> {
    let n = r.gen_range(2..7);
    let seed = r.gen();
    let mut valid: Vec<bool> = (0..n).map(|_| r.gen_bool(0.7)).collect();
    valid[0] = true;
    let inputs = [random_tensor(r, &[n], 2.0)];
    max_rel_error(&inputs, move |t, v| {
        let plain = t.softmax(v[0], None)?;
        let masked = t.softmax(v[0], Some(&valid))?;
        let a = weighted_sum(t, plain, seed)?;
        let b = weighted_sum(t, masked, seed + 1)?;
        t.add(a, b)
    })
}

fn segment_softmax(r: &mut Rng) -> Result<f64> {
    let lens: Vec<usize> = (0..r.gen_range(1..4)).map(|_| r.gen_range(1..5)).collect();
    let seed = r.gen();
    let n = lens.iter().sum();
    let inputs = [random_tensor(r, &[n], 2.0)];
    max_rel_error(&inputs, move |t, v| {
        let y = t.segment_softmax(v[0], &lens)?;
        weighted_sum(t, y, seed)
    })
}

fn lookup_and_segments(r: &mut Rng) -> Result<f64> {
    let (rows, d, _) = dims(r);
    let seed = r.gen();
    let lens: Vec<usize> = (0..r.gen_range(1..4)).map(|_| r.gen_range(1..4)).collect();
    let ids: Vec<usize> = (0..lens.iter().sum()).map(|_| r.gen_range(0..rows)).collect();
    let inputs = [random_tensor(r, &[rows, d], 1.0)];
    max_rel_error(&inputs, move |t, v| {
        let g = t.embedding_lookup(v[0], &ids)?;
        let s = t.segment_sum(g, &lens)?;
        weighted_sum(t, s, seed)
    })
}

fn row_dot(r: &mut Rng) -> Result<f64> {
    let (m, d, _) = dims(r);
    let seed = r.gen();
    let inputs = [random_tensor(r, &[m, d], 1.0), random_tensor(r, &[m, d], 1.0)];
    max_rel_error(&inputs, |t, v| {
        let y = t.row_dot(v[0], v[1])?;
        weighted_sum(t, y, seed)
    })
}

fn slices(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let (m, n) = (m + 1, n + 1);
    let seed = r.gen();
    let (rs, rl) = (r.gen_range(0..m), 1);
    let rl = r.gen_range(rl..=m - rs);
    let (cs, cl) = (r.gen_range(0..n), 1);
    let cl = r.gen_range(cl..=n - cs);
    let inputs = [random_tensor(r, &[m, n], 1.0)];
    max_rel_error(&inputs, move |t, v| {
        let a = t.slice_rows(v[0], rs, rl)?;
        let b = t.slice_cols(v[0], cs, cl)?;
        let a = weighted_sum(t, a, seed)?;
        let b = weighted_sum(t, b, seed + 1)?;
        t.add(a, b)
    })
}

fn reductions(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let inputs = [random_tensor(r, &[m, n], 1.0)];
    max_rel_error(&inputs, move |t, v| {
        let flat = t.reshape(v[0], &[m * n])?;
        let sq = t.mul(flat, flat)?;
        let s = t.sum(sq);
        let cube = t.mul(sq, flat)?;
        let mean = t.mean(cube);
        t.add(s, mean)
    })
}

fn dropout(r: &mut Rng) -> Result<f64> {
    let (m, n, _) = dims(r);
    let seed: u64 = r.gen();
    let inputs = [random_tensor(r, &[m, n], 1.0)];
    max_rel_error(&inputs, move |t, v| {
        let mut mask_rng = rng::stream(seed, "mask", &[]);
        let y = t.dropout(v[0], 0.8, true, &mut mask_rng)?;
        weighted_sum(t, y, seed)
    })
}

fn bce(r: &mut Rng) -> Result<f64> {
    let n = r.gen_range(1..8);
    let labels: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..2u8))).collect();
    let scale = r.gen_range(0.1..2.0);
    let inputs = [random_tensor(r, &[n, 1], 3.0)];
    max_rel_error(&inputs, move |t, v| {
        let p = t.sigmoid(v[0]);
        t.bce(p, &labels, scale)
    })
}

fn gcn(r: &mut Rng) -> Result<f64> {
    let (q, s, d) = (r.gen_range(2..6), r.gen_range(1..4), r.gen_range(1..4));
    let qs = random_question_skills(r, q.max(s), s, 2);
    let graph = RelationGraph::from_question_skills(&qs, s)?;
    let table = sample_neighbors(&graph, 2, 2, r.gen());
    let over_width = r.gen_bool(0.5);
    let seed = r.gen();
    let inputs = [
        away_from_zero(r, &[qs.len(), d], 0.05),
        away_from_zero(r, &[s, d], 0.05),
        random_tensor(r, &[d, d], 1.0),
        random_tensor(r, &[d], 0.5),
        random_tensor(r, &[d, d], 1.0),
        random_tensor(r, &[d], 0.5),
    ];
    max_rel_error(&inputs, move |t, v| {
        let single = gcn_layer(t, v[0], v[1], &table.question_rows, table.question_width, v[2], v[3], over_width)?;
        let layers = [
            GcnLayerVars { w_question: v[2], b_question: v[3], w_skill: v[2], b_skill: v[3] },
            GcnLayerVars { w_question: v[4], b_question: v[5], w_skill: v[4], b_skill: v[5] },
        ];
        let agg = propagate(t, v[0], v[1], &table, &layers, over_width)?;
        let a = weighted_sum(t, single, seed)?;
        let b = weighted_sum(t, agg.q_tilde, seed + 1)?;
        let c = weighted_sum(t, agg.s_tilde, seed + 2)?;
        let ab = t.add(a, b)?;
        t.add(ab, c)
    })
}

fn lstm_inputs(r: &mut Rng, input: usize, hidden: usize) -> Vec<Tensor> {
    let gi = input + 2 * hidden;
    vec![
        random_tensor(r, &[gi, hidden], 0.7),
        random_tensor(r, &[gi, hidden], 0.7),
        random_tensor(r, &[gi, hidden], 0.7),
        random_tensor(r, &[input + hidden, hidden], 0.7),
        random_tensor(r, &[hidden], 0.5),
        random_tensor(r, &[hidden], 0.5),
        random_tensor(r, &[hidden], 0.5),
        random_tensor(r, &[hidden], 0.5),
    ]
}

fn lstm_vars(v: &[Var], hidden: usize) -> LstmLayerVars {
    LstmLayerVars {
        w_input: v[0],
        w_forget: v[1],
        w_output: v[2],
        w_cell: v[3],
        b_input: v[4],
        b_forget: v[5],
        b_output: v[6],
        b_cell: v[7],
        hidden,
    }
}

fn lstm(r: &mut Rng) -> Result<f64> {
    let (input, hidden, b) = (r.gen_range(1..4), r.gen_range(1..4), r.gen_range(1..4));
    let mut inputs = lstm_inputs(r, input, hidden);
    inputs.push(random_tensor(r, &[b, input], 1.0));
    inputs.push(random_tensor(r, &[b, hidden], 1.0));
    inputs.push(random_tensor(r, &[b, hidden], 1.0));
    let seed = r.gen();
    max_rel_error(&inputs, move |t, v| {
        let layer = lstm_vars(v, hidden);
        let (h1, c1) = lstm_step(t, v[8], v[9], v[10], &layer)?;
        let (h2, c2) = lstm_step(t, v[8], h1, c1, &layer)?;
        let a = weighted_sum(t, h2, seed)?;
        let c = weighted_sum(t, c2, seed + 1)?;
        t.add(a, c)
    })
}

fn lstm_packed(r: &mut Rng) -> Result<f64> {
    let (input, hidden) = (r.gen_range(1..4), r.gen_range(1..4));
    let mut active: Vec<usize> = (0..r.gen_range(1..5)).map(|_| r.gen_range(1..4)).collect();
    active.sort_unstable_by(|a, b| b.cmp(a));
    let rows: usize = active.iter().sum();
    let mut inputs = lstm_inputs(r, input, hidden);
    inputs.push(random_tensor(r, &[rows, input], 1.0));
    let seed = r.gen();
    max_rel_error(&inputs, move |t, v| {
        let layer = lstm_vars(v, hidden);
        let out = lstm_layer(t, v[8], &active, &layer)?;
        weighted_sum(t, out, seed)
    })
}

fn encoder_and_interaction(r: &mut Rng) -> Result<f64> {
    let d = r.gen_range(1..4);
    let (nl, nr) = (r.gen_range(2..6), r.gen_range(2..6));
    let groups: Vec<PairGroup> = (0..r.gen_range(1..4))
        .map(|_| PairGroup {
            left: (0..r.gen_range(1..3)).map(|_| r.gen_range(0..nl)).collect(),
            right: (0..r.gen_range(1..3)).map(|_| r.gen_range(0..nr)).collect(),
        })
        .collect();
    let answers: Vec<usize> = (0..nl).map(|_| r.gen_range(0..2)).collect();
    let uniform = r.gen_bool(0.3);
    let labels: Vec<f64> = groups.iter().map(|_| f64::from(r.gen_range(0..2u8))).collect();
    let inputs = [
        random_tensor(r, &[nl, d], 1.0),
        random_tensor(r, &[2, d], 1.0),
        random_tensor(r, &[2 * d, d], 1.0),
        away_from_zero(r, &[d], 0.3),
        random_tensor(r, &[nr, d], 1.0),
        random_tensor(r, &[2 * d, 1], 1.0),
        random_tensor(r, &[1], 1.0),
    ];
    max_rel_error(&inputs, move |t, v| {
        let e = encode_exercise(t, v[0], &answers, v[1], v[2], v[3])?;
        let left = t.concat(&[v[0], e], 0)?;
        let out = interaction_predict(t, left, v[4], &groups, v[5], v[6], uniform)?;
        t.bce(out.predictions, &labels, 1.0 / labels.len() as f64)
    })
}

/// Toy config for the end-to-end check; `recap_v = -1` keeps the selection
/// fixed under perturbation.
fn toy_config(r: &mut Rng) -> ModelConfig {
    let mut m = tiny_model();
    m.embed_dim = 3;
    m.lstm_sizes = vec![4, 3];
    m.recap_v = -1.0;
    m.recap_mode = [RecapMode::SoftState, RecapMode::SoftExercise, RecapMode::HardState, RecapMode::HardExercise]
        [r.gen_range(0..4)];
    m.uniform_attention = r.gen_bool(0.2);
    m
}

/// Full model on a batch of two sequences (3 and 2 steps), dropout active
/// with a fixed mask.
pub fn end_to_end(r: &mut Rng) -> Result<f64> {
    let config = toy_config(r);
    let (q, s) = (5, 3);
    let qs = random_question_skills(r, q, s, 2);
    let graph = RelationGraph::from_question_skills(&qs, s)?;
    let sample = sample_batch(&graph, &config, r.gen());
    let a = [0usize, 1, 0].map(|_| Step { question: r.gen_range(0..q), correct: r.gen_range(0..2) });
    let b = [0usize, 1].map(|_| Step { question: r.gen_range(0..q), correct: r.gen_range(0..2) });
    let batch = Batch::from_segments(&[&a, &b]);
    let mut init = rng::stream(r.gen(), "init", &[]);
    let mut params = GiktParams::init(&config, q, s, &mut init);
    // Zero biases can park relu inputs exactly on the kink.
    for t in params.tensors_mut() {
        *t = away_from_zero(r, t.shape(), 0.05);
    }
    let inputs: Vec<Tensor> = params.named().into_iter().map(|(_, t)| t.clone()).collect();
    let dropout_seed: u64 = r.gen();
    max_rel_error(&inputs, move |t, v| {
        let bound = params.bind_vars(v)?;
        let mut drop = rng::stream(dropout_seed, "dropout", &[]);
        let out = forward_batch(t, &bound, &graph, &sample, &batch, &config, Some(&mut drop))?;
        t.bce(out.predictions, &out.labels, 1.0 / out.labels.len() as f64)
    })
}

/// Every case with its name.
pub fn all_cases() -> Vec<(&'static str, Case)> {
    vec![
        ("matmul", matmul),
        ("add_sub_mul", elementwise),
        ("relu_sigmoid_tanh_scale", unary),
        ("add_row", add_row),
        ("concat", concat),
        ("softmax", softmax),
        ("segment_softmax", segment_softmax),
        ("embedding_lookup_segment_sum", lookup_and_segments),
        ("row_dot", row_dot),
        ("slice_rows_slice_cols", slices),
        ("reshape_sum_mean", reductions),
        ("dropout", dropout),
        ("bce", bce),
        ("gcn", gcn),
        ("lstm_step", lstm),
        ("lstm_layer", lstm_packed),
        ("encoder_interaction", encoder_and_interaction),
        ("end_to_end", end_to_end),
    ]
}
