//! Synthetic interaction data.
//!
//! [`planted_rule`] is a tiny dataset whose answers follow a fixed rule, used
//! to check that training can fit it. [`assist_like`] produces logs with the
//! shape of a large skill-builder tutoring log: many questions per skill, a
//! few multi-skill questions, students working through blocks of one skill,
//! and correctness driven by an ability/difficulty model with learning.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, WeightedIndex};

use crate::data::{build_sequences, Dataset, ExerciseSequence, InteractionRecord, Step};
use crate::rng::{self, Rng};

/// 20 sequences of length 10 over 30 questions and 5 skills. A question is
/// answered correctly iff its index is below 15 after a fixed shuffle.
pub fn planted_rule(seed: u64) -> Dataset {
    const QUESTIONS: usize = 30;
    const SKILLS: usize = 5;
    let mut r = rng::stream(seed, "planted_rule", &[]);
    let mut perm: Vec<usize> = (0..QUESTIONS).collect();
    perm.shuffle(&mut r);
    let easy: Vec<bool> = (0..QUESTIONS).map(|q| perm[q] < QUESTIONS / 2).collect();
    let question_skills = (0..QUESTIONS)
        .map(|q| {
            let mut s = vec![q % SKILLS];
            if q % 7 == 0 {
                s.push((q + 1) % SKILLS);
                s.sort_unstable();
            }
            s
        })
        .collect();
    let sequences = (0..20)
        .map(|student| ExerciseSequence {
            student,
            steps: (0..10)
                .map(|_| {
                    let q = r.gen_range(0..QUESTIONS);
                    Step { question: q, correct: u8::from(easy[q]) }
                })
                .collect(),
        })
        .collect();
    Dataset {
        name: "planted_rule".into(),
        sequences,
        question_count: QUESTIONS,
        skill_count: SKILLS,
        question_skills,
        student_ids: (0..20).map(|i| format!("u{i}")).collect(),
        question_ids: (0..QUESTIONS).map(|i| format!("q{i}")).collect(),
        skill_ids: (0..SKILLS).map(|i| format!("s{i}")).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssistLikeConfig {
    pub students: usize,
    pub questions: usize,
    pub skills: usize,
    /// Probability that a question carries one more skill, applied repeatedly.
    pub extra_skill_prob: f64,
    pub mean_length: f64,
    /// Mean number of consecutive attempts on one skill.
    pub mean_block: f64,
    /// Knowledge gained per attempt on a skill.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for AssistLikeConfig {
    fn default() -> Self {
        AssistLikeConfig {
            students: 3852,
            questions: 17737,
            skills: 123,
            extra_skill_prob: 0.165,
            mean_length: 73.4,
            mean_block: 9.0,
            learning_rate: 0.08,
            seed: 0,
        }
    }
}

fn geometric(r: &mut Rng, mean: f64, min: usize) -> usize {
    let p = 1.0 / (mean - min as f64 + 1.0).max(1.0);
    let mut n = min;
    while r.gen::<f64>() > p {
        n += 1;
    }
    n
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Raw interaction records with the configured shape.
pub fn assist_like_records(cfg: &AssistLikeConfig) -> Vec<InteractionRecord> {
    let mut r = rng::stream(cfg.seed, "assist_like", &[]);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let skill_difficulty: Vec<f64> = (0..cfg.skills).map(|_| unit.sample(&mut r)).collect();

    // Round-robin primary skills keep every skill populated.
    let mut question_skills: Vec<BTreeSet<usize>> = Vec::with_capacity(cfg.questions);
    let mut skill_questions: Vec<Vec<usize>> = vec![Vec::new(); cfg.skills];
    for q in 0..cfg.questions {
        let mut s = BTreeSet::from([q % cfg.skills]);
        while s.len() < cfg.skills && r.gen::<f64>() < cfg.extra_skill_prob {
            s.insert(r.gen_range(0..cfg.skills));
        }
        for &k in &s {
            skill_questions[k].push(q);
        }
        question_skills.push(s);
    }
    let question_difficulty: Vec<f64> = question_skills
        .iter()
        .map(|s| {
            let base = s.iter().map(|&k| skill_difficulty[k]).sum::<f64>() / s.len() as f64;
            base + 0.7 * unit.sample(&mut r)
        })
        .collect();
    // Popularity inside a skill pool falls off with position.
    let pool_weights: Vec<WeightedIndex<f64>> = skill_questions
        .iter()
        .map(|qs| WeightedIndex::new((0..qs.len()).map(|i| 1.0 / (1.0 + i as f64).sqrt())).expect("non-empty pool"))
        .collect();
    let skill_popularity =
        WeightedIndex::new((0..cfg.skills).map(|i| 1.0 / (1.0 + i as f64 / 10.0))).expect("skills");

    let mut records = Vec::new();
    for student in 0..cfg.students {
        let ability = unit.sample(&mut r);
        let mut knowledge: Vec<f64> = (0..cfg.skills).map(|_| ability + 0.5 * unit.sample(&mut r)).collect();
        let len = geometric(&mut r, cfg.mean_length, 4);
        let mut order = 0i64;
        while (order as usize) < len {
            let skill = skill_popularity.sample(&mut r);
            let block = geometric(&mut r, cfg.mean_block, 1).min(len - order as usize);
            for _ in 0..block {
                let q = skill_questions[skill][pool_weights[skill].sample(&mut r)];
                let skills = &question_skills[q];
                let k = skills.iter().map(|&s| knowledge[s]).sum::<f64>() / skills.len() as f64;
                let p = sigmoid(1.7 * (k - question_difficulty[q]));
                let correct = u8::from(r.gen::<f64>() < p);
                for &s in skills {
                    knowledge[s] += cfg.learning_rate * (1.0 + f64::from(correct));
                }
                records.push(InteractionRecord {
                    student: student.to_string(),
                    question: q.to_string(),
                    skills: skills.iter().map(|s| s.to_string()).collect(),
                    correct,
                    order,
                    line: records.len() + 2,
                });
                order += 1;
            }
        }
    }
    records
}

/// [`assist_like_records`] grouped into a dataset.
pub fn assist_like(cfg: &AssistLikeConfig) -> Dataset {
    build_sequences("assist_like", &assist_like_records(cfg))
}

/// Seeded subset of `n` sequences sharing the full id spaces.
pub fn subsample_students(dataset: &Dataset, n: usize, seed: u64) -> Dataset {
    let mut idx: Vec<usize> = (0..dataset.sequences.len()).collect();
    idx.shuffle(&mut rng::stream(seed, "subsample", &[]));
    idx.truncate(n);
    idx.sort_unstable();
    dataset.with_sequences(idx.into_iter().map(|i| dataset.sequences[i].clone()).collect())
}
