use serde::{Deserialize, Serialize};

use crate::error::{GiktError, Result};
use crate::numerics::Tensor;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First/second moment estimates for every registered parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first: Vec<Tensor>,
    pub second: Vec<Tensor>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new<'a>(params: impl IntoIterator<Item = &'a Tensor>) -> Self {
        let first: Vec<Tensor> = params.into_iter().map(|p| Tensor::zeros(p.shape())).collect();
        AdamState {
            second: first.clone(),
            first,
            step: 0,
            beta1: BETA1,
            beta2: BETA2,
            epsilon: EPSILON,
        }
    }
}

/// One bias-corrected Adam step. `names` is only used for error messages.
pub fn adam_update(
    params: &mut [&mut Tensor],
    grads: &[Tensor],
    names: &[String],
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.first.len() {
        return Err(GiktError::Contract(format!(
            "adam: {} params, {} grads, {} moment slots",
            params.len(),
            grads.len(),
            state.first.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.shape() != g.shape() {
            return Err(GiktError::dim("adam", p.shape(), g.shape()));
        }
        if !g.is_finite() {
            let name = names.get(i).map_or("<unnamed>", String::as_str);
            return Err(GiktError::Numeric(format!("non-finite gradient for parameter {name}")));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.epsilon);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(&mut state.first)
        .zip(&mut state.second)
    {
        for (((w, &gi), mi), vi) in p
            .data_mut()
            .iter_mut()
            .zip(g.data())
            .zip(m.data_mut())
            .zip(v.data_mut())
        {
            *mi = b1 * *mi + (1.0 - b1) * gi;
            *vi = b2 * *vi + (1.0 - b2) * gi * gi;
            let m_hat = *mi / c1;
            let v_hat = *vi / c2;
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

/// Rescale gradients in place so their global L2 norm is at most `max_norm`.
pub fn clip_global_norm(grads: &mut [Tensor], max_norm: f64) -> f64 {
    let norm = grads
        .iter()
        .flat_map(|g| g.data())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            g.data_mut().iter_mut().for_each(|x| *x *= s);
        }
    }
    norm
}
