//! Shared fixtures for the integration suites.
#![allow(dead_code)]

pub mod checks;
pub mod forward;
pub mod gradcases;
pub mod gradcheck;
pub mod oracles;

use gikt::data::{Dataset, ExerciseSequence, Step};
use gikt::graph::GcnConfig;
use gikt::model::{ModelConfig, RecapMode};
use gikt::numerics::Tensor;
use gikt::rng::{self, Rng};
use gikt::training::TrainConfig;
use rand::Rng as _;

pub fn rng(seed: u64) -> Rng {
    rng::stream(seed, "tests", &[])
}

pub fn random_tensor(r: &mut Rng, shape: &[usize], scale: f64) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| r.gen_range(-scale..scale)).collect()).unwrap()
}

/// Small model so forward passes are cheap.
pub fn tiny_model() -> ModelConfig {
    ModelConfig {
        embed_dim: 4,
        lstm_sizes: vec![5, 4],
        gcn: GcnConfig {
            layers: 2,
            n_q: 2,
            n_s: 2,
            ..GcnConfig::default()
        },
        recap_mode: RecapMode::SoftState,
        recap_k: 2,
        recap_v: 0.0,
        recap_on_raw_embeddings: false,
        skills_in_interaction: 2,
        uniform_attention: false,
        keep_prob: 0.8,
    }
}

pub fn tiny_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        model: tiny_model(),
        batch_size: 4,
        learning_rate: 0.01,
        epochs: 2,
        patience: 0,
        seed,
        inference_runs: 2,
        max_len: 12,
        ..TrainConfig::default()
    }
}

/// Random question-skill map in which every skill has at least one question.
pub fn random_question_skills(r: &mut Rng, questions: usize, skills: usize, max_per_question: usize) -> Vec<Vec<usize>> {
    assert!(questions >= skills);
    (0..questions)
        .map(|q| {
            let mut s = vec![q % skills];
            for _ in 1..r.gen_range(1..=max_per_question) {
                s.push(r.gen_range(0..skills));
            }
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect()
}

/// Random dataset with both answer classes present.
pub fn random_dataset(seed: u64, students: usize, questions: usize, skills: usize, len: std::ops::RangeInclusive<usize>) -> Dataset {
    let mut r = rng(seed);
    let question_skills = random_question_skills(&mut r, questions, skills, 3);
    let sequences = (0..students)
        .map(|student| {
            let n = r.gen_range(len.clone());
            ExerciseSequence {
                student,
                steps: (0..n)
                    .map(|i| Step {
                        question: r.gen_range(0..questions),
                        correct: if i < 2 { (student + i) as u8 % 2 } else { r.gen_range(0..2) },
                    })
                    .collect(),
            }
        })
        .collect();
    Dataset {
        name: format!("random{seed}"),
        sequences,
        question_count: questions,
        skill_count: skills,
        question_skills,
        student_ids: (0..students).map(|i| i.to_string()).collect(),
        question_ids: (0..questions).map(|i| i.to_string()).collect(),
        skill_ids: (0..skills).map(|i| i.to_string()).collect(),
    }
}
