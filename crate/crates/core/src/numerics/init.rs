use rand::Rng as _;

use super::Tensor;
use crate::rng::Rng;

/// Glorot-uniform weights stored input-major as `[fan_in × fan_out]`.
pub fn glorot_uniform(fan_in: usize, fan_out: usize, rng: &mut Rng) -> Tensor {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    uniform(&[fan_in, fan_out], bound, rng)
}

pub fn embedding_uniform(rows: usize, dim: usize, rng: &mut Rng) -> Tensor {
    uniform(&[rows, dim], 0.05, rng)
}

pub fn uniform(shape: &[usize], bound: f64, rng: &mut Rng) -> Tensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
    Tensor::from_parts(shape.to_vec(), data)
}
