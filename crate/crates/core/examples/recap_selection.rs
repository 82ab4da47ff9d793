//! Which history entries the recap module recalls, by skill-set equality and
//! by embedding similarity.
//!
//! `cargo run --example recap_selection`

use gikt::graph::RelationGraph;
use gikt::model::{recap_hard, recap_soft};

fn main() -> gikt::Result<()> {
    let question_skills = vec![vec![0], vec![0, 1], vec![1], vec![0, 1], vec![2]];
    let graph = RelationGraph::from_question_skills(&question_skills, 3)?;
    let history = [0, 1, 2, 1, 4, 0, 3];
    let target = 3;
    println!("history questions {history:?}, target question {target}");
    for k in [1, 2, 5] {
        println!("hard, k={k}: timesteps {:?}", recap_hard(&history, target, &graph, k));
    }

    let embeddings = [
        vec![1.0, 0.0, 0.0],
        vec![0.7, 0.7, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.6, 0.8, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    let rows: Vec<&[f64]> = history.iter().map(|&q| embeddings[q].as_slice()).collect();
    for (k, v) in [(2, 0.0), (5, 0.5), (5, 0.99)] {
        let (steps, scores) = recap_soft(&rows, &embeddings[target], k, v);
        println!("soft, k={k} v={v}: timesteps {steps:?} with cosine {scores:.3?}");
    }
    Ok(())
}
