use crate::error::{GiktError, Result};
use crate::numerics::{Tape, Tensor, Var};

/// One prediction's interaction grid, as row ids into the left pool
/// (current state and recalled entries) and the right pool (target question
/// and related skills).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairGroup {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl PairGroup {
    pub fn pairs(&self) -> usize {
        self.left.len() * self.right.len()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct InteractionOutput {
    /// `[groups × 1]`.
    pub predictions: Var,
    /// Pair weights, `[pairs × 1]`, grouped consecutively, left-major.
    pub alpha: Var,
    /// `σ(⟨f_i, f_j⟩)` for every pair, same layout as `alpha`.
    pub pair_scores: Var,
}

/// Weighted sum of squashed inner products over every (left, right) pair.
/// Attention logits are `W·[f_i, f_j] + b`, normalised over each group's
/// pairs; `uniform` replaces them with equal weights.
pub fn interaction_predict(
    tape: &mut Tape,
    left_pool: Var,
    right_pool: Var,
    groups: &[PairGroup],
    attention_w: Var,
    attention_b: Var,
    uniform: bool,
) -> Result<InteractionOutput> {
    if groups.is_empty() {
        return Err(GiktError::Contract("interaction with no predictions".into()));
    }
    let mut left_ids = Vec::new();
    let mut right_ids = Vec::new();
    let mut lens = Vec::with_capacity(groups.len());
    for (n, g) in groups.iter().enumerate() {
        if g.left.is_empty() || g.right.is_empty() {
            return Err(GiktError::Contract(format!(
                "interaction group {n} has an empty side ({} left, {} right)",
                g.left.len(),
                g.right.len()
            )));
        }
        for &l in &g.left {
            for &r in &g.right {
                left_ids.push(l);
                right_ids.push(r);
            }
        }
        lens.push(g.pairs());
    }
    let lp = tape.embedding_lookup(left_pool, &left_ids)?;
    let rp = tape.embedding_lookup(right_pool, &right_ids)?;
    let dots = tape.row_dot(lp, rp)?;
    let pair_scores = tape.sigmoid(dots);
    let pairs = left_ids.len();

    let alpha = if uniform {
        let w: Vec<f64> = lens
            .iter()
            .flat_map(|&n| std::iter::repeat_n(1.0 / n as f64, n))
            .collect();
        tape.constant(Tensor::new(vec![pairs, 1], w)?)
    } else {
        let joined = tape.concat(&[lp, rp], 1)?;
        let lin = tape.matmul(joined, attention_w)?;
        let logits = tape.add_row(lin, attention_b)?;
        let flat = tape.reshape(logits, &[pairs])?;
        let soft = tape.segment_softmax(flat, &lens)?;
        tape.reshape(soft, &[pairs, 1])?
    };
    let weighted = tape.mul(alpha, pair_scores)?;
    let predictions = tape.segment_sum(weighted, &lens)?;
    Ok(InteractionOutput {
        predictions,
        alpha,
        pair_scores,
    })
}
