//! Reverse-mode automatic differentiation over dense tensors.
//!
//! A [`Tape`] records every operation in creation order, which is already a
//! topological order: an operation can only consume nodes that exist. Calling
//! [`Tape::backward`] sweeps the tape in reverse, accumulating gradients for
//! every node that transitively depends on a `requires_grad` leaf.

use rand::Rng as _;

use super::tensor::{gemm, Tensor};
use crate::error::{GiktError, Result};
use crate::rng::Rng;

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unary {
    Relu,
    Sigmoid,
    Tanh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binary {
    Add,
    Sub,
    Mul,
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Binary(Binary, Var, Var),
    AddRow(Var, Var),
    Scale(Var, f64),
    Unary(Unary, Var),
    Concat {
        parts: Vec<Var>,
        outer: usize,
        inner: usize,
        sizes: Vec<usize>,
    },
    Softmax(Var),
    SegmentSoftmax {
        x: Var,
        lens: Vec<usize>,
    },
    Gather {
        table: Var,
        ids: Vec<usize>,
    },
    SegmentSum {
        x: Var,
        lens: Vec<usize>,
    },
    RowDot(Var, Var),
    SliceRows {
        x: Var,
        start: usize,
    },
    SliceCols {
        x: Var,
        start: usize,
    },
    Sum(Var),
    Reshape(Var),
    Dropout {
        x: Var,
        mask: Vec<f64>,
    },
    Bce {
        p: Var,
        labels: Vec<f64>,
        scale: f64,
    },
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
    requires_grad: bool,
}

/// Recorded computation and, after [`Tape::backward`], its gradients.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Tensor>>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Gradient buffer of `v`, zero-initialized on first use; `None` for constants.
fn grad_slot<'a>(grads: &'a mut [Option<Tensor>], nodes: &[Node], v: Var) -> Option<&'a mut Tensor> {
    if !nodes[v.0].requires_grad {
        return None;
    }
    Some(grads[v.0].get_or_insert_with(|| Tensor::zeros(nodes[v.0].value.shape())))
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Leaf that never receives a gradient.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    fn shape(&self, v: Var) -> &[usize] {
        self.nodes[v.0].value.shape()
    }

    fn matrix_dims(&self, v: Var, op: &'static str) -> Result<(usize, usize)> {
        let s = self.shape(v);
        match s.len() {
            1 => Ok((1, s[0])),
            2 => Ok((s[0], s[1])),
            _ => Err(GiktError::dim(op, s, &[])),
        }
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (m, k) = self.matrix_dims(a, "matmul")?;
        let (k2, n) = self.matrix_dims(b, "matmul")?;
        if k != k2 || self.shape(b).len() != 2 {
            return Err(GiktError::dim("matmul", self.shape(a), self.shape(b)));
        }
        let mut out = vec![0.0; m * n];
        gemm(
            m,
            k,
            n,
            self.value(a).data(),
            false,
            self.value(b).data(),
            false,
            &mut out,
            false,
        );
        let rg = self.needs(&[a, b]);
        Ok(self.push(Tensor::from_parts(vec![m, n], out), Op::MatMul(a, b), rg))
    }

    pub fn binary(&mut self, op: Binary, a: Var, b: Var) -> Result<Var> {
        if self.shape(a) != self.shape(b) {
            return Err(GiktError::dim("elementwise", self.shape(a), self.shape(b)));
        }
        let (va, vb) = (self.value(a), self.value(b));
        let value = match op {
            Binary::Add => va.zip_map(vb, |x, y| x + y),
            Binary::Sub => va.zip_map(vb, |x, y| x - y),
            Binary::Mul => va.zip_map(vb, |x, y| x * y),
        };
        let rg = self.needs(&[a, b]);
        Ok(self.push(value, Op::Binary(op, a, b), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(Binary::Add, a, b)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(Binary::Sub, a, b)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(Binary::Mul, a, b)
    }

    pub fn unary(&mut self, op: Unary, x: Var) -> Var {
        let value = match op {
            Unary::Relu => self.value(x).map(|v| v.max(0.0)),
            Unary::Sigmoid => self.value(x).map(sigmoid),
            Unary::Tanh => self.value(x).map(f64::tanh),
        };
        let rg = self.needs(&[x]);
        self.push(value, Op::Unary(op, x), rg)
    }

    pub fn relu(&mut self, x: Var) -> Var {
        self.unary(Unary::Relu, x)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.unary(Unary::Sigmoid, x)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.unary(Unary::Tanh, x)
    }

    pub fn scale(&mut self, x: Var, c: f64) -> Var {
        let value = self.value(x).map(|v| v * c);
        let rg = self.needs(&[x]);
        self.push(value, Op::Scale(x, c), rg)
    }

    /// `x[m×n] + bias[n]`, the bias broadcast over rows.
    pub fn add_row(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (_, n) = self.matrix_dims(x, "add_row")?;
        if self.value(bias).len() != n {
            return Err(GiktError::dim("add_row", self.shape(x), self.shape(bias)));
        }
        let b = self.value(bias).data().to_vec();
        let mut value = self.value(x).clone();
        for row in value.data_mut().chunks_mut(n) {
            for (v, bb) in row.iter_mut().zip(&b) {
                *v += bb;
            }
        }
        let rg = self.needs(&[x, bias]);
        Ok(self.push(value, Op::AddRow(x, bias), rg))
    }

    /// Concatenate along `axis`; all other dimensions must agree.
    pub fn concat(&mut self, parts: &[Var], axis: usize) -> Result<Var> {
        let first = parts
            .first()
            .ok_or_else(|| GiktError::Contract("concat of zero tensors".into()))?;
        let base = self.shape(*first).to_vec();
        if axis >= base.len() {
            return Err(GiktError::dim("concat", &base, &[axis]));
        }
        let mut sizes = Vec::with_capacity(parts.len());
        for &p in parts {
            let s = self.shape(p);
            let consistent = s.len() == base.len()
                && s.iter()
                    .zip(&base)
                    .enumerate()
                    .all(|(i, (a, b))| i == axis || a == b);
            if !consistent {
                return Err(GiktError::dim("concat", &base, s));
            }
            sizes.push(s[axis]);
        }
        let outer: usize = base[..axis].iter().product();
        let inner: usize = base[axis + 1..].iter().product();
        let total: usize = sizes.iter().sum();
        let mut data = Vec::with_capacity(outer * total * inner);
        for o in 0..outer {
            for (&p, &sz) in parts.iter().zip(&sizes) {
                let chunk = sz * inner;
                data.extend_from_slice(&self.value(p).data()[o * chunk..(o + 1) * chunk]);
            }
        }
        let mut shape = base;
        shape[axis] = total;
        let rg = self.needs(parts);
        Ok(self.push(
            Tensor::from_parts(shape, data),
            Op::Concat {
                parts: parts.to_vec(),
                outer,
                inner,
                sizes,
            },
            rg,
        ))
    }

    /// Softmax over a 1-D tensor; entries with `valid[i] == false` are exactly 0.
    pub fn softmax(&mut self, x: Var, valid: Option<&[bool]>) -> Result<Var> {
        let v = self.value(x);
        if v.shape().len() != 1 {
            return Err(GiktError::dim("softmax", v.shape(), &[]));
        }
        let n = v.len();
        if let Some(m) = valid {
            if m.len() != n {
                return Err(GiktError::dim("softmax", v.shape(), &[m.len()]));
            }
        }
        let keep = |i: usize| valid.is_none_or(|m| m[i]);
        let max = (0..n)
            .filter(|&i| keep(i))
            .map(|i| v.data()[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(GiktError::EmptySelection(
                "softmax with every entry masked".into(),
            ));
        }
        let mut out: Vec<f64> = (0..n)
            .map(|i| if keep(i) { (v.data()[i] - max).exp() } else { 0.0 })
            .collect();
        let z: f64 = out.iter().sum();
        out.iter_mut().for_each(|o| *o /= z);
        let rg = self.needs(&[x]);
        Ok(self.push(Tensor::from_parts(vec![n], out), Op::Softmax(x), rg))
    }

    /// Independent softmax over consecutive segments of a flat tensor.
    pub fn segment_softmax(&mut self, x: Var, lens: &[usize]) -> Result<Var> {
        let v = self.value(x);
        let total: usize = lens.iter().sum();
        if total != v.len() {
            return Err(GiktError::dim("segment_softmax", v.shape(), &[total]));
        }
        if lens.contains(&0) {
            return Err(GiktError::EmptySelection("empty softmax segment".into()));
        }
        let mut out = Vec::with_capacity(total);
        let mut at = 0;
        for &len in lens {
            let seg = &v.data()[at..at + len];
            let max = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let start = out.len();
            out.extend(seg.iter().map(|&s| (s - max).exp()));
            let z: f64 = out[start..].iter().sum();
            out[start..].iter_mut().for_each(|o| *o /= z);
            at += len;
        }
        let shape = v.shape().to_vec();
        let rg = self.needs(&[x]);
        Ok(self.push(
            Tensor::from_parts(shape, out),
            Op::SegmentSoftmax {
                x,
                lens: lens.to_vec(),
            },
            rg,
        ))
    }

    /// Row gather from a `[V×d]` table; backward scatter-adds.
    pub fn embedding_lookup(&mut self, table: Var, ids: &[usize]) -> Result<Var> {
        let (rows, d) = self.matrix_dims(table, "embedding_lookup")?;
        if ids.is_empty() {
            return Err(GiktError::Contract("embedding lookup with no ids".into()));
        }
        let t = self.value(table).data();
        let mut data = Vec::with_capacity(ids.len() * d);
        for &id in ids {
            if id >= rows {
                return Err(GiktError::Index { id, len: rows });
            }
            data.extend_from_slice(&t[id * d..(id + 1) * d]);
        }
        let rg = self.needs(&[table]);
        Ok(self.push(
            Tensor::from_parts(vec![ids.len(), d], data),
            Op::Gather {
                table,
                ids: ids.to_vec(),
            },
            rg,
        ))
    }

    /// Sum consecutive groups of rows: `[Σlens × d] -> [lens.len() × d]`.
    pub fn segment_sum(&mut self, x: Var, lens: &[usize]) -> Result<Var> {
        let (rows, d) = self.matrix_dims(x, "segment_sum")?;
        let total: usize = lens.iter().sum();
        if total != rows || lens.is_empty() {
            return Err(GiktError::dim("segment_sum", self.shape(x), &[total]));
        }
        let src = self.value(x).data();
        let mut data = vec![0.0; lens.len() * d];
        let mut r = 0;
        for (g, &len) in lens.iter().enumerate() {
            let dst = &mut data[g * d..(g + 1) * d];
            for _ in 0..len {
                for (o, s) in dst.iter_mut().zip(&src[r * d..(r + 1) * d]) {
                    *o += s;
                }
                r += 1;
            }
        }
        let rg = self.needs(&[x]);
        Ok(self.push(
            Tensor::from_parts(vec![lens.len(), d], data),
            Op::SegmentSum {
                x,
                lens: lens.to_vec(),
            },
            rg,
        ))
    }

    /// Row-wise inner product: `[m×d]·[m×d] -> [m×1]`.
    pub fn row_dot(&mut self, a: Var, b: Var) -> Result<Var> {
        if self.shape(a) != self.shape(b) {
            return Err(GiktError::dim("row_dot", self.shape(a), self.shape(b)));
        }
        let (m, d) = self.matrix_dims(a, "row_dot")?;
        let (va, vb) = (self.value(a).data(), self.value(b).data());
        let data = (0..m)
            .map(|i| {
                va[i * d..(i + 1) * d]
                    .iter()
                    .zip(&vb[i * d..(i + 1) * d])
                    .map(|(x, y)| x * y)
                    .sum()
            })
            .collect();
        let rg = self.needs(&[a, b]);
        Ok(self.push(Tensor::from_parts(vec![m, 1], data), Op::RowDot(a, b), rg))
    }

    pub fn slice_rows(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let (rows, d) = self.matrix_dims(x, "slice_rows")?;
        if len == 0 || start + len > rows {
            return Err(GiktError::dim("slice_rows", self.shape(x), &[start, len]));
        }
        let data = self.value(x).data()[start * d..(start + len) * d].to_vec();
        let rg = self.needs(&[x]);
        Ok(self.push(
            Tensor::from_parts(vec![len, d], data),
            Op::SliceRows { x, start },
            rg,
        ))
    }

    /// Columns `start..start + len` of a matrix.
    pub fn slice_cols(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let (rows, d) = self.matrix_dims(x, "slice_cols")?;
        if len == 0 || start + len > d {
            return Err(GiktError::dim("slice_cols", self.shape(x), &[start, len]));
        }
        let src = self.value(x).data();
        let mut data = Vec::with_capacity(rows * len);
        for r in 0..rows {
            data.extend_from_slice(&src[r * d + start..r * d + start + len]);
        }
        let rg = self.needs(&[x]);
        Ok(self.push(
            Tensor::from_parts(vec![rows, len], data),
            Op::SliceCols { x, start },
            rg,
        ))
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let s = self.value(x).sum();
        let rg = self.needs(&[x]);
        self.push(Tensor::scalar(s), Op::Sum(x), rg)
    }

    pub fn mean(&mut self, x: Var) -> Var {
        let n = self.value(x).len() as f64;
        let s = self.sum(x);
        self.scale(s, 1.0 / n)
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var> {
        let value = self.value(x).reshape(shape)?;
        let rg = self.needs(&[x]);
        Ok(self.push(value, Op::Reshape(x), rg))
    }

    /// Inverted dropout: survivors are scaled by `1/keep_prob`, eval mode is the identity.
    pub fn dropout(
        &mut self,
        x: Var,
        keep_prob: f64,
        training: bool,
        rng: &mut Rng,
    ) -> Result<Var> {
        if !(keep_prob > 0.0 && keep_prob <= 1.0) {
            return Err(GiktError::Config(format!(
                "dropout keep_prob must be in (0, 1], got {keep_prob}"
            )));
        }
        if !training || keep_prob == 1.0 {
            return Ok(x);
        }
        let scale = 1.0 / keep_prob;
        let mask: Vec<f64> = (0..self.value(x).len())
            .map(|_| if rng.gen::<f64>() < keep_prob { scale } else { 0.0 })
            .collect();
        let value = {
            let v = self.value(x);
            Tensor::from_parts(
                v.shape().to_vec(),
                v.data().iter().zip(&mask).map(|(a, m)| a * m).collect(),
            )
        };
        let rg = self.needs(&[x]);
        Ok(self.push(value, Op::Dropout { x, mask }, rg))
    }

    /// Binary cross-entropy over probabilities, summed then multiplied by `scale`.
    pub fn bce(&mut self, p: Var, labels: &[f64], scale: f64) -> Result<Var> {
        let pv = self.value(p);
        if pv.len() != labels.len() {
            return Err(GiktError::dim("bce", pv.shape(), &[labels.len()]));
        }
        let mut total = 0.0;
        for (i, (&pi, &y)) in pv.data().iter().zip(labels).enumerate() {
            if !(pi > 0.0 && pi < 1.0) {
                return Err(GiktError::Numeric(format!(
                    "prediction {i} = {pi} is outside (0, 1)"
                )));
            }
            total -= y * pi.ln() + (1.0 - y) * (1.0 - pi).ln();
        }
        let rg = self.needs(&[p]);
        Ok(self.push(
            Tensor::scalar(total * scale),
            Op::Bce {
                p,
                labels: labels.to_vec(),
                scale,
            },
            rg,
        ))
    }

    /// Reverse sweep from a scalar loss.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(GiktError::Contract("backward on an empty tape".into()));
        }
        if !self.value(loss).is_scalar() {
            return Err(GiktError::Contract(format!(
                "backward needs a scalar loss, got shape {:?}",
                self.shape(loss)
            )));
        }
        self.grads = (0..self.nodes.len()).map(|_| None).collect();
        self.grads[loss.0] = Some(Tensor::ones(self.shape(loss)));
        for i in (0..=loss.0).rev() {
            if !self.nodes[i].requires_grad {
                continue;
            }
            let Some(g) = self.grads[i].take() else {
                continue;
            };
            self.propagate(i, &g);
            self.grads[i] = Some(g);
        }
        Ok(())
    }

    fn accumulate(&mut self, v: Var, g: Tensor) {
        if !self.nodes[v.0].requires_grad {
            return;
        }
        match &mut self.grads[v.0] {
            Some(existing) => existing.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    fn propagate(&mut self, i: usize, g: &Tensor) {
        let node = &self.nodes[i];
        let out = &node.value;
        let mut updates: Vec<(Var, Tensor)> = Vec::new();
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
                let (m, n) = (out.shape()[0], out.shape()[1]);
                let k = vb.shape()[0];
                if self.nodes[a.0].requires_grad {
                    let mut ga = vec![0.0; m * k];
                    gemm(m, n, k, g.data(), false, vb.data(), true, &mut ga, false);
                    updates.push((*a, Tensor::from_parts(va.shape().to_vec(), ga)));
                }
                if self.nodes[b.0].requires_grad {
                    let mut gb = vec![0.0; k * n];
                    gemm(k, m, n, va.data(), true, g.data(), false, &mut gb, false);
                    updates.push((*b, Tensor::from_parts(vb.shape().to_vec(), gb)));
                }
            }
            Op::Binary(op, a, b) => match op {
                Binary::Add => {
                    updates.push((*a, g.clone()));
                    updates.push((*b, g.clone()));
                }
                Binary::Sub => {
                    updates.push((*a, g.clone()));
                    updates.push((*b, g.map(|x| -x)));
                }
                Binary::Mul => {
                    let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
                    updates.push((*a, g.zip_map(vb, |x, y| x * y)));
                    updates.push((*b, g.zip_map(va, |x, y| x * y)));
                }
            },
            Op::AddRow(x, bias) => {
                updates.push((*x, g.clone()));
                let bshape = self.nodes[bias.0].value.shape().to_vec();
                let n = g.cols();
                let mut gb = vec![0.0; n];
                for row in g.data().chunks(n) {
                    for (o, r) in gb.iter_mut().zip(row) {
                        *o += r;
                    }
                }
                updates.push((*bias, Tensor::from_parts(bshape, gb)));
            }
            Op::Scale(x, c) => updates.push((*x, g.map(|v| v * c))),
            Op::Unary(op, x) => {
                let local = match op {
                    Unary::Relu => g.zip_map(&self.nodes[x.0].value, |gg, xx| {
                        if xx > 0.0 {
                            gg
                        } else {
                            0.0
                        }
                    }),
                    Unary::Sigmoid => g.zip_map(out, |gg, s| gg * s * (1.0 - s)),
                    Unary::Tanh => g.zip_map(out, |gg, t| gg * (1.0 - t * t)),
                };
                updates.push((*x, local));
            }
            Op::Concat {
                parts,
                outer,
                inner,
                sizes,
            } => {
                let total: usize = sizes.iter().sum();
                let mut offset = 0;
                for (&p, &sz) in parts.iter().zip(sizes) {
                    if self.nodes[p.0].requires_grad {
                        let mut gp = Vec::with_capacity(outer * sz * inner);
                        for o in 0..*outer {
                            let base = (o * total + offset) * inner;
                            gp.extend_from_slice(&g.data()[base..base + sz * inner]);
                        }
                        let shape = self.nodes[p.0].value.shape().to_vec();
                        updates.push((p, Tensor::from_parts(shape, gp)));
                    }
                    offset += sz;
                }
            }
            Op::Softmax(x) => {
                let dot: f64 = g.data().iter().zip(out.data()).map(|(a, b)| a * b).sum();
                updates.push((*x, g.zip_map(out, |gg, y| y * (gg - dot))));
            }
            Op::SegmentSoftmax { x, lens } => {
                let mut gx = Vec::with_capacity(out.len());
                let mut at = 0;
                for &len in lens {
                    let (ys, gs) = (&out.data()[at..at + len], &g.data()[at..at + len]);
                    let dot: f64 = ys.iter().zip(gs).map(|(a, b)| a * b).sum();
                    gx.extend(ys.iter().zip(gs).map(|(y, gg)| y * (gg - dot)));
                    at += len;
                }
                updates.push((*x, Tensor::from_parts(out.shape().to_vec(), gx)));
            }
            Op::Gather { table, ids } => {
                let d = g.cols();
                if let Some(gt) = grad_slot(&mut self.grads, &self.nodes, *table) {
                    let gt = gt.data_mut();
                    for (r, &id) in ids.iter().enumerate() {
                        for (o, s) in gt[id * d..(id + 1) * d]
                            .iter_mut()
                            .zip(&g.data()[r * d..(r + 1) * d])
                        {
                            *o += s;
                        }
                    }
                }
            }
            Op::SegmentSum { x, lens } => {
                let d = g.cols();
                let xshape = self.nodes[x.0].value.shape().to_vec();
                let mut gx = Vec::with_capacity(xshape.iter().product());
                for (s, &len) in lens.iter().enumerate() {
                    for _ in 0..len {
                        gx.extend_from_slice(&g.data()[s * d..(s + 1) * d]);
                    }
                }
                updates.push((*x, Tensor::from_parts(xshape, gx)));
            }
            Op::RowDot(a, b) => {
                let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
                let d = va.cols();
                let scale_rows = |v: &Tensor| {
                    let data = v
                        .data()
                        .chunks(d)
                        .zip(g.data())
                        .flat_map(|(row, &gg)| row.iter().map(move |x| x * gg))
                        .collect();
                    Tensor::from_parts(v.shape().to_vec(), data)
                };
                updates.push((*a, scale_rows(vb)));
                updates.push((*b, scale_rows(va)));
            }
            Op::SliceRows { x, start } => {
                let d = g.cols();
                if let Some(gx) = grad_slot(&mut self.grads, &self.nodes, *x) {
                    for (o, s) in gx.data_mut()[start * d..start * d + g.len()].iter_mut().zip(g.data()) {
                        *o += s;
                    }
                }
            }
            Op::SliceCols { x, start } => {
                let len = g.cols();
                if let Some(gx) = grad_slot(&mut self.grads, &self.nodes, *x) {
                    let d = gx.cols();
                    let gx = gx.data_mut();
                    for (r, row) in g.data().chunks(len).enumerate() {
                        for (o, s) in gx[r * d + start..r * d + start + len].iter_mut().zip(row) {
                            *o += s;
                        }
                    }
                }
            }
            Op::Sum(x) => {
                let shape = self.nodes[x.0].value.shape().to_vec();
                updates.push((*x, Tensor::full(&shape, g.item())));
            }
            Op::Reshape(x) => {
                let shape = self.nodes[x.0].value.shape().to_vec();
                updates.push((*x, Tensor::from_parts(shape, g.data().to_vec())));
            }
            Op::Dropout { x, mask } => {
                let data = g.data().iter().zip(mask).map(|(a, m)| a * m).collect();
                updates.push((*x, Tensor::from_parts(g.shape().to_vec(), data)));
            }
            Op::Bce { p, labels, scale } => {
                let pv = &self.nodes[p.0].value;
                let up = g.item() * scale;
                let data = pv
                    .data()
                    .iter()
                    .zip(labels)
                    .map(|(&pi, &y)| up * (pi - y) / (pi * (1.0 - pi)))
                    .collect();
                updates.push((*p, Tensor::from_parts(pv.shape().to_vec(), data)));
            }
        }
        for (v, gv) in updates {
            self.accumulate(v, gv);
        }
    }
}
