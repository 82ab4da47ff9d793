//! Fit a tiny dataset with a planted answer rule and report training AUC.
//!
//! `cargo run --release --example overfit_planted [epochs] [learning_rate]`

use gikt::eval::auc;
use gikt::graph::build_graph;
use gikt::synth::planted_rule;
use gikt::training::{predict, prediction_pairs, train, TrainConfig};

fn main() -> gikt::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let learning_rate = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.001);
    let data = planted_rule(7);
    let config = TrainConfig {
        epochs,
        patience: 0,
        learning_rate,
        batch_size: 20,
        inference_runs: 1,
        ..TrainConfig::default()
    };
    let start = std::time::Instant::now();
    let outcome = train(&data, &data, &config, |m| {
        if m.epoch % 10 == 0 || m.epoch == 1 {
            println!("epoch {:>3}  loss {:.4}  train auc {:.4}", m.epoch, m.train_loss, m.test_auc);
        }
    })?;
    let graph = build_graph(&data)?;
    let (scores, labels) = prediction_pairs(&predict(&outcome.last, &graph, &data, &config)?);
    println!(
        "final train auc {:.4} (best {:.4} at epoch {}) in {:.1}s",
        auc(&scores, &labels)?,
        outcome.best_auc,
        outcome.best_epoch,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
