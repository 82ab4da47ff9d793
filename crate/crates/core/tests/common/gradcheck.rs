//! Central finite-difference oracle for tape gradients.

use gikt::numerics::{Tape, Tensor, Var};
use gikt::Result;

pub const STEP: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;
/// Denominator floor so gradients that are analytically ~0 compare absolutely.
pub const ABS_FLOOR: f64 = 1e-6;

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(ABS_FLOOR)
}

/// Autodiff gradients for every input, in input order.
pub fn autodiff<F>(inputs: &[Tensor], f: &F) -> Result<(f64, Vec<Tensor>)>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.param(t.clone())).collect();
    let loss = f(&mut tape, &vars)?;
    tape.backward(loss)?;
    let grads = vars
        .iter()
        .zip(inputs)
        .map(|(v, t)| {
            tape.grad(*v)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(t.shape()))
        })
        .collect();
    Ok((tape.value(loss).item(), grads))
}

fn eval<F>(inputs: &[Tensor], f: &F) -> Result<f64>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    let mut tape = Tape::new();
    let vars: Vec<Var> = inputs.iter().map(|t| tape.constant(t.clone())).collect();
    let loss = f(&mut tape, &vars)?;
    Ok(tape.value(loss).item())
}

/// Numerical gradients by central differences.
pub fn numerical<F>(inputs: &[Tensor], f: &F) -> Result<Vec<Tensor>>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    let mut out = Vec::with_capacity(inputs.len());
    for i in 0..inputs.len() {
        let mut g = Tensor::zeros(inputs[i].shape());
        for j in 0..inputs[i].len() {
            let mut plus = inputs.to_vec();
            plus[i].data_mut()[j] += STEP;
            let mut minus = inputs.to_vec();
            minus[i].data_mut()[j] -= STEP;
            g.data_mut()[j] = (eval(&plus, f)? - eval(&minus, f)?) / (2.0 * STEP);
        }
        out.push(g);
    }
    Ok(out)
}

/// Largest elementwise relative error between autodiff and finite differences.
pub fn max_rel_error<F>(inputs: &[Tensor], f: F) -> Result<f64>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    let (_, analytic) = autodiff(inputs, &f)?;
    let numeric = numerical(inputs, &f)?;
    let mut worst = 0.0f64;
    for (a, n) in analytic.iter().zip(&numeric) {
        for (x, y) in a.data().iter().zip(n.data()) {
            worst = worst.max(rel_err(*x, *y));
        }
    }
    Ok(worst)
}
