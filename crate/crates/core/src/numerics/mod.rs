//! Dense tensors and the autodiff tape every model equation is built on.

mod init;
mod tape;
mod tensor;

pub use init::{embedding_uniform, glorot_uniform, uniform};
pub use tape::{Binary, Tape, Unary, Var};
pub use tensor::Tensor;
