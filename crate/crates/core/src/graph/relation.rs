use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{GiktError, Result};

/// Bipartite adjacency in both directions, neighbor lists sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationGraph {
    pub question_neighbors: Vec<Vec<usize>>,
    pub skill_neighbors: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub edges: usize,
    pub mean_question_degree: f64,
    pub max_question_degree: usize,
    pub mean_skill_degree: f64,
    pub max_skill_degree: usize,
}

impl RelationGraph {
    pub fn from_question_skills(question_skills: &[Vec<usize>], skill_count: usize) -> Result<Self> {
        let mut question_neighbors = Vec::with_capacity(question_skills.len());
        let mut skill_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); skill_count];
        for (q, skills) in question_skills.iter().enumerate() {
            let set: BTreeSet<usize> = skills.iter().copied().collect();
            if set.is_empty() {
                return Err(GiktError::Graph(format!("question {q} has an empty skill set")));
            }
            for &s in &set {
                if s >= skill_count {
                    return Err(GiktError::Graph(format!(
                        "question {q} references skill {s}, but only {skill_count} skills exist"
                    )));
                }
                skill_sets[s].insert(q);
            }
            question_neighbors.push(set.into_iter().collect());
        }
        if let Some(s) = skill_sets.iter().position(BTreeSet::is_empty) {
            return Err(GiktError::Graph(format!("skill {s} has no related questions")));
        }
        Ok(RelationGraph {
            question_neighbors,
            skill_neighbors: skill_sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    pub fn question_count(&self) -> usize {
        self.question_neighbors.len()
    }

    pub fn skill_count(&self) -> usize {
        self.skill_neighbors.len()
    }

    pub fn has_edge(&self, q: usize, s: usize) -> bool {
        self.question_neighbors
            .get(q)
            .is_some_and(|n| n.binary_search(&s).is_ok())
    }

    pub fn is_symmetric(&self) -> bool {
        self.question_neighbors
            .iter()
            .enumerate()
            .all(|(q, ss)| ss.iter().all(|&s| self.skill_neighbors[s].binary_search(&q).is_ok()))
            && self
                .skill_neighbors
                .iter()
                .enumerate()
                .all(|(s, qs)| qs.iter().all(|&q| self.has_edge(q, s)))
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let edges: usize = self.question_neighbors.iter().map(Vec::len).sum();
        let mean = |n: usize| if n == 0 { 0.0 } else { edges as f64 / n as f64 };
        DegreeStats {
            edges,
            mean_question_degree: mean(self.question_count()),
            max_question_degree: self.question_neighbors.iter().map(Vec::len).max().unwrap_or(0),
            mean_skill_degree: mean(self.skill_count()),
            max_skill_degree: self.skill_neighbors.iter().map(Vec::len).max().unwrap_or(0),
        }
    }
}

pub fn build_graph(dataset: &Dataset) -> Result<RelationGraph> {
    RelationGraph::from_question_skills(&dataset.question_skills, dataset.skill_count)
}

impl TryFrom<&Dataset> for RelationGraph {
    type Error = GiktError;

    fn try_from(dataset: &Dataset) -> Result<Self> {
        build_graph(dataset)
    }
}

/// One `q_id<TAB>s_id` line per edge, questions ascending.
pub fn write_edge_list(graph: &RelationGraph, mut out: impl Write) -> std::io::Result<()> {
    for (q, skills) in graph.question_neighbors.iter().enumerate() {
        for s in skills {
            writeln!(out, "{q}\t{s}")?;
        }
    }
    Ok(())
}

pub fn read_edge_list(input: impl BufRead) -> Result<RelationGraph> {
    let mut edges = Vec::new();
    let (mut nq, mut ns) = (0, 0);
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| GiktError::Format(format!("edge list line {}: {e}", i + 1)))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse = |x: Option<&str>| -> Result<usize> {
            x.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| GiktError::Format(format!("edge list line {}: expected q<TAB>s", i + 1)))
        };
        let mut parts = line.split('\t');
        let (q, s) = (parse(parts.next())?, parse(parts.next())?);
        nq = nq.max(q + 1);
        ns = ns.max(s + 1);
        edges.push((q, s));
    }
    let mut qs = vec![Vec::new(); nq];
    for (q, s) in edges {
        qs[q].push(s);
    }
    RelationGraph::from_question_skills(&qs, ns)
}
