//! GCN depth sweep on a 500-student subsample of synthetic ASSIST09-shaped data.
//!
//! `cargo run --release --example layer_sweep [epochs] [seeds] [layers...]`

use gikt::eval::{run_with_label, Variant};
use gikt::synth::{assist_like, subsample_students, AssistLikeConfig};
use gikt::training::TrainConfig;

fn main() -> gikt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let epochs = args.first().and_then(|a| a.parse().ok()).unwrap_or(10);
    let seeds: u64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut layers: Vec<usize> = args.iter().skip(2).filter_map(|a| a.parse().ok()).collect();
    if layers.is_empty() {
        layers = vec![0, 1, 2, 3];
    }
    let full = assist_like(&AssistLikeConfig::default());
    let data = subsample_students(&full, 500, 0);
    println!("{}", data.stats());
    for &l in &layers {
        let mut mean = 0.0;
        for seed in 0..seeds {
            let mut config = TrainConfig { epochs, seed, ..TrainConfig::default() };
            config.model.gcn.layers = l;
            let start = std::time::Instant::now();
            let r = run_with_label(&data, &config, Variant::Gikt, &format!("layers{l}"), false)?;
            println!(
                "layers {l} seed {seed}: test auc {:.4} (best epoch {}) in {:.0}s",
                r.test_auc,
                r.best_epoch,
                start.elapsed().as_secs_f64()
            );
            mean += r.test_auc / seeds as f64;
        }
        println!("layers {l}: mean test auc {mean:.4}");
    }
    Ok(())
}
