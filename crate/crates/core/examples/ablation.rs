//! Compare the full model with its component ablations on synthetic data.
//!
//! `cargo run --release --example ablation [epochs] [variants...]`

use gikt::eval::{run_variant, Variant};
use gikt::synth::{assist_like, AssistLikeConfig};
use gikt::training::TrainConfig;

fn main() -> gikt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epochs = args.first().and_then(|a| a.parse().ok()).unwrap_or(2);
    let mut variants = args.iter().skip(1).map(|v| v.parse()).collect::<gikt::Result<Vec<Variant>>>()?;
    if variants.is_empty() {
        variants = vec![Variant::Gikt, Variant::Rhs, Variant::Rh, Variant::Rs, Variant::Ra];
    }
    let data = assist_like(&AssistLikeConfig { students: 150, questions: 400, skills: 30, ..AssistLikeConfig::default() });
    let mut base = TrainConfig { epochs, patience: 0, ..TrainConfig::default() };
    base.model.embed_dim = 24;
    base.model.lstm_sizes = vec![24];
    for v in variants {
        let r = run_variant(&data, &base, v)?;
        println!("{:<10} test AUC {:.4}  best epoch {}", r.label, r.test_auc, r.best_epoch);
    }
    Ok(())
}
