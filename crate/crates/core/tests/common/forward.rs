//! Randomised forward-pass fixtures.

use gikt::data::{Batch, Dataset};
use gikt::graph::{GcnConfig, RelationGraph};
use gikt::model::{forward_batch, sample_batch, GiktParams, LstmLayerParams, LstmLayerVars, ModelConfig, RecapMode};
use gikt::numerics::Tape;
use gikt::rng::Rng;
use gikt::Result;
use rand::Rng as _;

use super::{random_dataset, rng};

pub const MODES: [RecapMode; 4] = [
    RecapMode::HardExercise,
    RecapMode::SoftExercise,
    RecapMode::HardState,
    RecapMode::SoftState,
];

pub fn random_model(r: &mut Rng) -> ModelConfig {
    let d = r.gen_range(2..6);
    let mut lstm_sizes: Vec<usize> = (0..r.gen_range(0..2)).map(|_| r.gen_range(2..6)).collect();
    lstm_sizes.push(d);
    ModelConfig {
        embed_dim: d,
        lstm_sizes,
        gcn: GcnConfig {
            layers: r.gen_range(0..=3),
            n_q: r.gen_range(1..4),
            n_s: r.gen_range(1..4),
            mean_over_width: r.gen_bool(0.2),
            per_type_weights: r.gen_bool(0.2),
        },
        recap_mode: MODES[r.gen_range(0..4)],
        recap_k: r.gen_range(0..4),
        recap_v: r.gen_range(-1.0..0.5),
        recap_on_raw_embeddings: r.gen_bool(0.2),
        skills_in_interaction: r.gen_range(0..4),
        uniform_attention: r.gen_bool(0.2),
        keep_prob: 0.8,
    }
}

pub fn bind_lstm(tape: &mut Tape, p: &LstmLayerParams) -> LstmLayerVars {
    LstmLayerVars {
        w_input: tape.constant(p.w_input.clone()),
        w_forget: tape.constant(p.w_forget.clone()),
        w_output: tape.constant(p.w_output.clone()),
        w_cell: tape.constant(p.w_cell.clone()),
        b_input: tape.constant(p.b_input.clone()),
        b_forget: tape.constant(p.b_forget.clone()),
        b_output: tape.constant(p.b_output.clone()),
        b_cell: tape.constant(p.b_cell.clone()),
        hidden: p.hidden(),
    }
}

/// Initialised parameters with every bias perturbed away from zero.
pub fn random_params(config: &ModelConfig, data: &Dataset, r: &mut Rng) -> GiktParams {
    let mut params = GiktParams::init(config, data.question_count, data.skill_count, r);
    for t in params.tensors_mut() {
        for x in t.data_mut() {
            *x += r.gen_range(-0.3..0.3);
        }
    }
    params
}

pub struct ForwardValues {
    pub probabilities: Vec<f64>,
    /// Sum of the pair weights of each prediction.
    pub alpha_sums: Vec<f64>,
}

/// One evaluation-mode forward pass over a random batch with a random config.
pub fn random_forward(seed: u64) -> Result<ForwardValues> {
    let mut r = rng(seed);
    let config = random_model(&mut r);
    let questions = r.gen_range(3..9);
    let skills = r.gen_range(1..=questions.min(4));
    let data = random_dataset(seed, r.gen_range(1..4), questions, skills, 2..=7);
    let graph = RelationGraph::from_question_skills(&data.question_skills, skills)?;
    let params = random_params(&config, &data, &mut r);
    let sample = sample_batch(&graph, &config, seed);
    let batch = Batch::from_sequences(&data.sequences);
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape, false);
    let out = forward_batch(&mut tape, &bound, &graph, &sample, &batch, &config, None)?;
    let alpha = tape.value(out.alpha).data();
    let mut at = 0;
    let alpha_sums = out
        .groups
        .iter()
        .map(|g| {
            let s = alpha[at..at + g.pairs()].iter().sum();
            at += g.pairs();
            s
        })
        .collect();
    Ok(ForwardValues {
        probabilities: tape.value(out.predictions).data().to_vec(),
        alpha_sums,
    })
}
