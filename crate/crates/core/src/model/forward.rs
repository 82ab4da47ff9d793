use rand::seq::index;

use super::cells::{encode_exercise, lstm_layer};
use super::interaction::{interaction_predict, PairGroup};
use super::recap::{recap_hard, recap_soft, RecapSelection};
use super::{BoundParams, ModelConfig};
use crate::data::{Batch, ExerciseSequence};
use crate::error::{GiktError, Result};
use crate::graph::{propagate, sample_neighbors, NeighborTable, RelationGraph};
use crate::numerics::{Tape, Var};
use crate::rng::{self, Rng};

/// Neighbor draws shared by every sequence of one batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSample {
    pub neighbors: NeighborTable,
    /// Distinct related skills of each question used in the interaction grid.
    pub related_skills: Vec<Vec<usize>>,
}

pub fn sample_batch(graph: &RelationGraph, config: &ModelConfig, seed: u64) -> BatchSample {
    let neighbors = sample_neighbors(graph, config.gcn.n_q, config.gcn.n_s, seed);
    let k = config.skills_in_interaction;
    let mut r = rng::stream(seed, "related_skills", &[]);
    let related_skills = graph
        .question_neighbors
        .iter()
        .map(|skills| {
            if k == 0 {
                Vec::new()
            } else if skills.len() <= k {
                skills.clone()
            } else {
                let mut pick: Vec<usize> = index::sample(&mut r, skills.len(), k)
                    .into_iter()
                    .map(|i| skills[i])
                    .collect();
                pick.sort_unstable();
                pick
            }
        })
        .collect();
    BatchSample {
        neighbors,
        related_skills,
    }
}

#[derive(Clone, Debug)]
pub struct ForwardOutput {
    /// `[predictions × 1]`, ordered by batch row then timestep.
    pub predictions: Var,
    pub alpha: Var,
    /// `(batch row, timestep)` of each prediction; timesteps start at 1.
    pub positions: Vec<(usize, usize)>,
    pub labels: Vec<f64>,
    pub recap: Vec<RecapSelection>,
    pub groups: Vec<PairGroup>,
}

/// Full forward pass over a padded batch. `dropout` carries the generator in
/// training mode and is `None` for evaluation.
pub fn forward_batch(
    tape: &mut Tape,
    params: &BoundParams,
    graph: &RelationGraph,
    sample: &BatchSample,
    batch: &Batch,
    config: &ModelConfig,
    mut dropout: Option<&mut Rng>,
) -> Result<ForwardOutput> {
    let rows = batch.size();
    let t_max = batch.max_len();
    if t_max < 2 {
        return Err(GiktError::Contract(
            "batch has no sequence with at least 2 steps".into(),
        ));
    }
    let q_count = graph.question_count();
    let keep = config.keep_prob;
    let training = dropout.is_some();
    let mut drop = |tape: &mut Tape, x: Var| -> Result<Var> {
        match dropout.as_deref_mut() {
            Some(r) => tape.dropout(x, keep, training, r),
            None => Ok(x),
        }
    };

    let agg = propagate(
        tape,
        params.question_embed,
        params.skill_embed,
        &sample.neighbors,
        &params.gcn,
        config.gcn.mean_over_width,
    )?;

    // History steps are 0..t_max-1. Slots order batch rows by descending
    // length so the rows still running at step t are slots 0..active[t];
    // packed row offset[t] + slot holds step t of that slot.
    let hist = t_max - 1;
    let mut by_len: Vec<usize> = (0..rows).collect();
    by_len.sort_by_key(|&b| std::cmp::Reverse(batch.lens[b]));
    let mut slot = vec![0; rows];
    for (i, &b) in by_len.iter().enumerate() {
        slot[b] = i;
    }
    let active: Vec<usize> = (0..hist)
        .map(|t| by_len.iter().take_while(|&&b| batch.lens[b] > t).count())
        .collect();
    let mut offset = Vec::with_capacity(hist);
    let mut packed = 0;
    for &n in &active {
        offset.push(packed);
        packed += n;
    }
    let mut q_ids = Vec::with_capacity(packed);
    let mut a_ids = Vec::with_capacity(packed);
    for (t, &n) in active.iter().enumerate() {
        for &b in &by_len[..n] {
            q_ids.push(batch.questions[b][t]);
            a_ids.push(usize::from(batch.answers[b][t]));
        }
    }
    let q_rows = tape.embedding_lookup(agg.q_tilde, &q_ids)?;
    let e = encode_exercise(
        tape,
        q_rows,
        &a_ids,
        params.answer_embed,
        params.encoder_w,
        params.encoder_b,
    )?;
    let e = drop(tape, e)?;

    let mut layer_input = e;
    for layer in &params.lstm {
        let stacked = lstm_layer(tape, layer_input, &active, layer)?;
        layer_input = drop(tape, stacked)?;
    }
    let states = layer_input;

    let left_pool = tape.concat(&[states, e], 0)?;
    let right_pool = tape.concat(&[agg.q_tilde, agg.s_tilde], 0)?;
    let exercise_offset = packed;

    let score_table = if config.recap_on_raw_embeddings {
        params.question_embed
    } else {
        agg.q_tilde
    };

    let mut groups = Vec::new();
    let mut positions = Vec::new();
    let mut labels = Vec::new();
    let mut recaps = Vec::new();
    for (b, &len) in batch.lens.iter().enumerate() {
        for t in 1..len {
            let target = batch.questions[b][t];
            let history = &batch.questions[b][..t];
            let selection = if config.recap_k == 0 {
                RecapSelection {
                    mode: config.recap_mode,
                    timesteps: Vec::new(),
                    scores: Vec::new(),
                }
            } else if config.recap_mode.is_soft() {
                let table = tape.value(score_table);
                let hv: Vec<&[f64]> = history.iter().map(|&q| table.row(q)).collect();
                let (timesteps, scores) =
                    recap_soft(&hv, table.row(target), config.recap_k, config.recap_v);
                RecapSelection {
                    mode: config.recap_mode,
                    timesteps,
                    scores,
                }
            } else {
                RecapSelection {
                    mode: config.recap_mode,
                    timesteps: recap_hard(history, target, graph, config.recap_k),
                    scores: Vec::new(),
                }
            };
            let sb = slot[b];
            let mut left = vec![offset[t - 1] + sb];
            left.extend(selection.timesteps.iter().map(|&i| {
                if config.recap_mode.uses_states() {
                    offset[i] + sb
                } else {
                    exercise_offset + offset[i] + sb
                }
            }));
            let mut right = vec![target];
            right.extend(sample.related_skills[target].iter().map(|&s| q_count + s));
            groups.push(PairGroup { left, right });
            positions.push((b, t));
            labels.push(f64::from(batch.answers[b][t]));
            recaps.push(selection);
        }
    }

    let out = interaction_predict(
        tape,
        left_pool,
        right_pool,
        &groups,
        params.attention_w,
        params.attention_b,
        config.uniform_attention,
    )?;
    Ok(ForwardOutput {
        predictions: out.predictions,
        alpha: out.alpha,
        positions,
        labels,
        recap: recaps,
        groups,
    })
}

/// Predictions `p_2..p_T` for one sequence in evaluation mode.
pub fn forward_sequence(
    tape: &mut Tape,
    params: &BoundParams,
    graph: &RelationGraph,
    sample: &BatchSample,
    sequence: &ExerciseSequence,
    config: &ModelConfig,
) -> Result<ForwardOutput> {
    if sequence.len() < 2 {
        return Err(GiktError::Contract(format!(
            "sequence of length {} has nothing to predict",
            sequence.len()
        )));
    }
    let batch = Batch::from_sequences(std::slice::from_ref(sequence));
    forward_batch(tape, params, graph, sample, &batch, config, None)
}
