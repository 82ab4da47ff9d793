use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::data::{segment, Batch, Dataset, Step};
use crate::error::Result;
use crate::graph::RelationGraph;
use crate::model::{forward_batch, sample_batch, BatchSample, GiktParams};
use crate::numerics::Tape;
use crate::rng::derive_seed;

/// Averaged prediction for every predictable step of one sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequencePrediction {
    pub student: usize,
    /// Step indices within the full sequence.
    pub steps: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub labels: Vec<u8>,
}

struct Segment<'a> {
    sequence: usize,
    offset: usize,
    steps: &'a [Step],
}

/// Evaluation-mode predictions averaged over `config.inference_runs`
/// independent neighbor draws. Each run fixes one draw for the whole pass.
pub fn predict(
    params: &GiktParams,
    graph: &RelationGraph,
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<Vec<SequencePrediction>> {
    let mut segments = Vec::new();
    for (si, seq) in dataset.sequences.iter().enumerate() {
        let mut offset = 0;
        for steps in segment(&seq.steps, config.max_len) {
            if steps.len() >= 2 {
                segments.push(Segment { sequence: si, offset, steps });
            }
            offset += steps.len();
        }
    }
    let mut out: Vec<SequencePrediction> = dataset
        .sequences
        .iter()
        .map(|s| SequencePrediction {
            student: s.student,
            steps: Vec::new(),
            probabilities: Vec::new(),
            labels: Vec::new(),
        })
        .collect();
    // Layout is fixed by segment order, so fill steps and labels once.
    for seg in &segments {
        let p = &mut out[seg.sequence];
        for t in 1..seg.steps.len() {
            p.steps.push(seg.offset + t);
            p.labels.push(seg.steps[t].correct);
            p.probabilities.push(0.0);
        }
    }
    let chunks: Vec<&[Segment]> = segments.chunks(config.batch_size.max(1)).collect();
    for run in 0..config.inference_runs {
        let sample = sample_batch(
            graph,
            &config.model,
            derive_seed(config.seed, "inference", &[run as u64]),
        );
        let per_chunk = run_chunks(params, graph, &sample, &chunks, config)?;
        let k = (run + 1) as f64;
        let mut cursor = vec![0usize; out.len()];
        for (chunk, probs) in chunks.iter().zip(per_chunk) {
            let mut it = probs.into_iter();
            for seg in chunk.iter() {
                let p = &mut out[seg.sequence];
                for _ in 1..seg.steps.len() {
                    let x = it.next().expect("one prediction per non-first step");
                    let slot = &mut p.probabilities[cursor[seg.sequence]];
                    *slot += (x - *slot) / k;
                    cursor[seg.sequence] += 1;
                }
            }
        }
    }
    Ok(out)
}

fn run_chunks(
    params: &GiktParams,
    graph: &RelationGraph,
    sample: &BatchSample,
    chunks: &[&[Segment]],
    config: &TrainConfig,
) -> Result<Vec<Vec<f64>>> {
    let one = |chunk: &[Segment]| -> Result<Vec<f64>> {
        let views: Vec<&[Step]> = chunk.iter().map(|s| s.steps).collect();
        let batch = Batch::from_segments(&views);
        let mut tape = Tape::new();
        let bound = params.bind(&mut tape, false);
        let fwd = forward_batch(&mut tape, &bound, graph, sample, &batch, &config.model, None)?;
        Ok(tape.value(fwd.predictions).data().to_vec())
    };
    let threads = config.threads.max(1).min(chunks.len().max(1));
    if threads == 1 {
        return chunks.iter().map(|c| one(c)).collect();
    }
    let per = chunks.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .chunks(per)
            .map(|group| scope.spawn(move || group.iter().map(|c| one(c)).collect::<Result<Vec<_>>>()))
            .collect();
        let mut all = Vec::with_capacity(chunks.len());
        for h in handles {
            all.extend(h.join().expect("inference worker panicked")?);
        }
        Ok(all)
    })
}

/// Flatten predictions into pooled `(scores, labels)` for AUC.
pub fn prediction_pairs(preds: &[SequencePrediction]) -> (Vec<f64>, Vec<u8>) {
    let scores = preds.iter().flat_map(|p| p.probabilities.iter().copied()).collect();
    let labels = preds.iter().flat_map(|p| p.labels.iter().copied()).collect();
    (scores, labels)
}
