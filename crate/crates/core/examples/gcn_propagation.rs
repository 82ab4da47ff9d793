//! Build a question-skill graph, sample fixed-width neighborhoods and propagate
//! embeddings through a few graph convolution layers.
//!
//! `cargo run --example gcn_propagation`

use gikt::graph::{propagate, sample_neighbors, GcnConfig, RelationGraph};
use gikt::model::{GiktParams, ModelConfig};
use gikt::numerics::Tape;
use gikt::rng;

fn main() -> gikt::Result<()> {
    // Five questions over three skills; question 2 needs two skills.
    let question_skills = vec![vec![0], vec![0], vec![0, 1], vec![1], vec![2]];
    let graph = RelationGraph::from_question_skills(&question_skills, 3)?;
    println!("{:?}", graph.degree_stats());

    let table = sample_neighbors(&graph, 2, 2, 42);
    for q in 0..graph.question_count() {
        println!("question {q}: sampled skills {:?}", table.question_row(q));
    }
    for s in 0..graph.skill_count() {
        println!("skill {s}: sampled questions {:?}", table.skill_row(s));
    }

    let config = ModelConfig {
        embed_dim: 4,
        lstm_sizes: vec![4],
        gcn: GcnConfig { layers: 3, n_q: 2, n_s: 2, ..GcnConfig::default() },
        ..ModelConfig::default()
    };
    let params = GiktParams::init(&config, 5, 3, &mut rng::stream(1, "init", &[]));
    let mut tape = Tape::new();
    let bound = params.bind(&mut tape, false);
    for layers in 0..=3 {
        let agg = propagate(&mut tape, bound.question_embed, bound.skill_embed, &table, &bound.gcn[..layers], false)?;
        println!("after {layers} layers, question 0 = {:.4?}", tape.value(agg.q_tilde).row(0));
    }
    Ok(())
}
