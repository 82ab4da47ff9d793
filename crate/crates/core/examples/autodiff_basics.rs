//! Build a small expression on the tape, run backward and read gradients.
//!
//! `cargo run --example autodiff_basics`

use gikt::numerics::{Tape, Tensor};

fn main() -> gikt::Result<()> {
    let mut tape = Tape::new();
    let x = tape.param(Tensor::matrix(2, 3, vec![0.5, -1.0, 2.0, 0.1, 0.3, -0.7])?);
    let w = tape.param(Tensor::matrix(3, 1, vec![0.2, -0.4, 0.6])?);
    let bias = tape.constant(Tensor::vector(vec![0.1])?);

    // p = sigmoid(x·w + b), then mean cross-entropy against fixed labels.
    let lin = tape.matmul(x, w)?;
    let logits = tape.add_row(lin, bias)?;
    let p = tape.sigmoid(logits);
    let loss = tape.bce(p, &[1.0, 0.0], 0.5)?;
    tape.backward(loss)?;

    println!("p = {:?}", tape.value(p).data());
    println!("loss = {:.6}", tape.value(loss).item());
    println!("dloss/dw = {:?}", tape.grad(w).map(Tensor::data));
    println!("dloss/dx = {:?}", tape.grad(x).map(Tensor::data));
    println!("bias is a constant: gradient {:?}", tape.grad(bias));
    Ok(())
}
