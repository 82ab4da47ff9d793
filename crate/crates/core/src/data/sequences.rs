use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{InteractionRecord, MIN_SEQUENCE_LEN_EXCLUSIVE};
use crate::error::{GiktError, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub question: usize,
    pub correct: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExerciseSequence {
    pub student: usize,
    pub steps: Vec<Step>,
}

impl ExerciseSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Dense-id sequences plus the maps back to raw ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub sequences: Vec<ExerciseSequence>,
    pub question_count: usize,
    pub skill_count: usize,
    /// Sorted skill ids of each question.
    pub question_skills: Vec<Vec<usize>>,
    pub student_ids: Vec<String>,
    pub question_ids: Vec<String>,
    pub skill_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub students: usize,
    pub questions: usize,
    pub skills: usize,
    pub exercises: usize,
    pub questions_per_skill: f64,
    pub skills_per_question: f64,
    pub attempts_per_question: f64,
    pub attempts_per_skill: f64,
}

impl std::fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "students\t{}", self.students)?;
        writeln!(f, "questions\t{}", self.questions)?;
        writeln!(f, "skills\t{}", self.skills)?;
        writeln!(f, "exercises\t{}", self.exercises)?;
        writeln!(f, "questions_per_skill\t{:.3}", self.questions_per_skill)?;
        writeln!(f, "skills_per_question\t{:.3}", self.skills_per_question)?;
        writeln!(f, "attempts_per_question\t{:.3}", self.attempts_per_question)?;
        write!(f, "attempts_per_skill\t{:.3}", self.attempts_per_skill)
    }
}

impl Dataset {
    pub fn exercise_count(&self) -> usize {
        self.sequences.iter().map(ExerciseSequence::len).sum()
    }

    /// Same id spaces, a different subset of sequences.
    pub fn with_sequences(&self, sequences: Vec<ExerciseSequence>) -> Dataset {
        Dataset {
            sequences,
            ..self.clone_maps()
        }
    }

    fn clone_maps(&self) -> Dataset {
        Dataset {
            name: self.name.clone(),
            sequences: Vec::new(),
            question_count: self.question_count,
            skill_count: self.skill_count,
            question_skills: self.question_skills.clone(),
            student_ids: self.student_ids.clone(),
            question_ids: self.question_ids.clone(),
            skill_ids: self.skill_ids.clone(),
        }
    }

    pub fn stats(&self) -> DatasetStats {
        let exercises = self.exercise_count();
        let edges: usize = self.question_skills.iter().map(Vec::len).sum();
        let mut skill_attempts = 0usize;
        for seq in &self.sequences {
            for s in &seq.steps {
                skill_attempts += self.question_skills[s.question].len();
            }
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        DatasetStats {
            students: self.sequences.len(),
            questions: self.question_count,
            skills: self.skill_count,
            exercises,
            questions_per_skill: ratio(edges, self.skill_count),
            skills_per_question: ratio(edges, self.question_count),
            attempts_per_question: ratio(exercises, self.question_count),
            attempts_per_skill: ratio(skill_attempts, self.skill_count),
        }
    }

    /// Structural checks for datasets loaded from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GiktError::Load(m));
        if self.question_skills.len() != self.question_count
            || self.question_ids.len() != self.question_count
        {
            return bad(format!(
                "question maps disagree with question_count {}",
                self.question_count
            ));
        }
        if self.skill_ids.len() != self.skill_count {
            return bad(format!("skill map disagrees with skill_count {}", self.skill_count));
        }
        for (q, skills) in self.question_skills.iter().enumerate() {
            if skills.is_empty() {
                return bad(format!("question {q} has no skills"));
            }
            if let Some(&s) = skills.iter().find(|&&s| s >= self.skill_count) {
                return bad(format!("question {q} references skill {s} out of range"));
            }
        }
        for seq in &self.sequences {
            if seq.student >= self.student_ids.len() {
                return bad(format!("student id {} out of range", seq.student));
            }
            if let Some(s) = seq
                .steps
                .iter()
                .find(|s| s.question >= self.question_count || s.correct > 1)
            {
                return bad(format!("invalid step {s:?} for student {}", seq.student));
            }
        }
        Ok(())
    }
}

/// Numbers sort numerically, everything else lexicographically after them.
fn id_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

fn dense_ids<'a>(raw: impl Iterator<Item = &'a str>) -> (Vec<String>, BTreeMap<String, usize>) {
    let mut ids: Vec<String> = raw.collect::<BTreeSet<_>>().into_iter().map(String::from).collect();
    ids.sort_by(|a, b| id_order(a, b));
    let map = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    (ids, map)
}

/// Group by student, order by `(order, line)`, drop sequences of length ≤ 3,
/// and remap the surviving ids densely.
pub fn build_sequences(name: &str, records: &[InteractionRecord]) -> Dataset {
    let mut by_student: BTreeMap<&str, Vec<&InteractionRecord>> = BTreeMap::new();
    for r in records {
        by_student.entry(&r.student).or_default().push(r);
    }
    let mut kept: Vec<(&str, Vec<&InteractionRecord>)> = by_student
        .into_iter()
        .filter(|(_, rs)| rs.len() > MIN_SEQUENCE_LEN_EXCLUSIVE)
        .collect();
    kept.sort_by(|a, b| id_order(a.0, b.0));
    for (_, rs) in &mut kept {
        rs.sort_by_key(|r| (r.order, r.line));
    }

    let all = || kept.iter().flat_map(|(_, rs)| rs.iter());
    let (student_ids, student_map) = dense_ids(kept.iter().map(|(s, _)| *s));
    let (question_ids, question_map) = dense_ids(all().map(|r| r.question.as_str()));
    let (skill_ids, skill_map) = dense_ids(all().flat_map(|r| r.skills.iter().map(String::as_str)));

    let mut question_skills: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); question_ids.len()];
    for r in all() {
        let q = question_map[&r.question];
        question_skills[q].extend(r.skills.iter().map(|s| skill_map[s]));
    }

    let sequences = kept
        .iter()
        .map(|(student, rs)| ExerciseSequence {
            student: student_map[*student],
            steps: rs
                .iter()
                .map(|r| Step {
                    question: question_map[&r.question],
                    correct: r.correct,
                })
                .collect(),
        })
        .collect();

    Dataset {
        name: name.to_string(),
        sequences,
        question_count: question_ids.len(),
        skill_count: skill_ids.len(),
        question_skills: question_skills
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
        student_ids,
        question_ids,
        skill_ids,
    }
}

/// Sequence-level seeded split; `ratio` is the training share.
pub fn split_train_test(dataset: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(GiktError::Config(format!("split ratio must be in (0, 1), got {ratio}")));
    }
    let n = dataset.sequences.len();
    if n < 2 {
        return Err(GiktError::Split(format!("need at least 2 sequences, have {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, "split", &[]));
    let n_train = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
    let pick = |idx: &[usize]| idx.iter().map(|&i| dataset.sequences[i].clone()).collect();
    Ok((
        dataset.with_sequences(pick(&order[..n_train])),
        dataset.with_sequences(pick(&order[n_train..])),
    ))
}
