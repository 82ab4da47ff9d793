use rand::seq::SliceRandom;

use super::{Dataset, ExerciseSequence, Step};
use crate::rng;

/// A padded mini-batch of sequence segments, indexed `[row][timestep]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub questions: Vec<Vec<usize>>,
    pub answers: Vec<Vec<u8>>,
    pub mask: Vec<Vec<bool>>,
    pub lens: Vec<usize>,
}

impl Batch {
    pub fn from_segments(segments: &[&[Step]]) -> Batch {
        let max_len = segments.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut b = Batch {
            questions: Vec::with_capacity(segments.len()),
            answers: Vec::with_capacity(segments.len()),
            mask: Vec::with_capacity(segments.len()),
            lens: Vec::with_capacity(segments.len()),
        };
        for seg in segments {
            let pad = max_len - seg.len();
            b.questions.push(seg.iter().map(|s| s.question).chain(std::iter::repeat_n(0, pad)).collect());
            b.answers.push(seg.iter().map(|s| s.correct).chain(std::iter::repeat_n(0, pad)).collect());
            b.mask.push(std::iter::repeat_n(true, seg.len()).chain(std::iter::repeat_n(false, pad)).collect());
            b.lens.push(seg.len());
        }
        b
    }

    pub fn from_sequences(seqs: &[ExerciseSequence]) -> Batch {
        let segs: Vec<&[Step]> = seqs.iter().map(|s| s.steps.as_slice()).collect();
        Batch::from_segments(&segs)
    }

    pub fn size(&self) -> usize {
        self.lens.len()
    }

    pub fn max_len(&self) -> usize {
        self.questions.first().map_or(0, Vec::len)
    }
}

/// Cut a sequence into consecutive pieces of at most `max_len` steps.
pub fn segment(steps: &[Step], max_len: usize) -> Vec<&[Step]> {
    steps.chunks(max_len.max(1)).collect()
}

pub struct BatchIter<'a> {
    segments: Vec<&'a [Step]>,
    batch_size: usize,
    at: usize,
}

impl Iterator for BatchIter<'_> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        if self.at >= self.segments.len() {
            return None;
        }
        let end = (self.at + self.batch_size).min(self.segments.len());
        let b = Batch::from_segments(&self.segments[self.at..end]);
        self.at = end;
        Some(b)
    }
}

/// Segment every sequence and group the segments into padded batches.
/// With a seed the segment order is shuffled; without one it is dataset order.
pub fn batch_iterator(dataset: &Dataset, batch_size: usize, max_len: usize, seed: Option<u64>) -> BatchIter<'_> {
    let mut segments: Vec<&[Step]> = dataset
        .sequences
        .iter()
        .flat_map(|s| segment(&s.steps, max_len))
        .collect();
    if let Some(seed) = seed {
        segments.shuffle(&mut rng::stream(seed, "batches", &[]));
    }
    BatchIter {
        segments,
        batch_size: batch_size.max(1),
        at: 0,
    }
}
