//! Rank a small hyperparameter grid by test AUC.
//!
//! `cargo run --release --example grid_search`

use gikt::eval::{grid_search, GridKnob, GridSpec};
use gikt::synth::{assist_like, AssistLikeConfig};
use gikt::training::TrainConfig;

fn main() -> gikt::Result<()> {
    let data = assist_like(&AssistLikeConfig { students: 120, questions: 300, skills: 25, ..AssistLikeConfig::default() });
    let mut base = TrainConfig { epochs: 2, patience: 0, ..TrainConfig::default() };
    base.model.embed_dim = 16;
    base.model.lstm_sizes = vec![16];
    let grid = GridSpec::default()
        .with(GridKnob::QuestionNeighbors, vec![2, 4])
        .with(GridKnob::RecapK, vec![1, 5]);
    let ranked = grid_search(&data, &base, &grid, |r| {
        eprintln!("finished {} with {:.4}", r.label, r.test_auc);
        Ok(())
    })?;
    for (i, r) in ranked.iter().enumerate() {
        println!("{}. {:<20} {:.4}", i + 1, r.label, r.test_auc);
    }
    Ok(())
}
