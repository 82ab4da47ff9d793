//! Train on synthetic ASSISTments-shaped data, save the best checkpoint,
//! reload it and score the held-out students.
//!
//! `cargo run --release --example train_and_checkpoint [students] [epochs]`

use gikt::data::split_train_test;
use gikt::eval::evaluate;
use gikt::graph::build_graph;
use gikt::model::{load_checkpoint, save_checkpoint, Checkpoint};
use gikt::synth::{assist_like, AssistLikeConfig};
use gikt::training::{predict, train, TrainConfig, METRICS_HEADER};

fn main() -> gikt::Result<()> {
    let mut args = std::env::args().skip(1);
    let students = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let epochs = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let data = assist_like(&AssistLikeConfig { students, questions: 600, skills: 40, ..AssistLikeConfig::default() });
    println!("{}", data.stats());

    let mut config = TrainConfig { epochs, patience: 2, ..TrainConfig::default() };
    config.model.embed_dim = 32;
    config.model.lstm_sizes = vec![48, 32];
    let (train_set, test_set) = split_train_test(&data, config.train_ratio, config.seed)?;
    println!("{METRICS_HEADER}");
    let outcome = train(&train_set, &test_set, &config, |m| println!("{}", m.log_line()))?;

    let dir = std::env::temp_dir().join("gikt_example");
    std::fs::create_dir_all(&dir).map_err(|e| gikt::GiktError::io(&dir, e))?;
    let path = dir.join("checkpoint.bin");
    let config_json = serde_json::to_value(&config)?;
    save_checkpoint(&Checkpoint::from_params(&outcome.best, config_json), &path)?;
    let restored = load_checkpoint(&path)?.into_params(&config.model)?;

    let graph = build_graph(&train_set)?;
    let (auc, per_student, n) = evaluate(&restored, &graph, &test_set, &config, true)?;
    println!(
        "reloaded {}: test AUC {auc:.4} (per-student {:.4}) over {n} predictions, best epoch {}",
        path.display(),
        per_student.unwrap_or(f64::NAN),
        outcome.best_epoch
    );
    let first = &predict(&restored, &graph, &test_set, &config)?[0];
    println!("first test student, first steps: {:.3?}", &first.probabilities[..first.probabilities.len().min(8)]);
    Ok(())
}
