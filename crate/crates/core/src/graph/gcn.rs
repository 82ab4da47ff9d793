use serde::{Deserialize, Serialize};

use super::NeighborTable;
use crate::error::{GiktError, Result};
use crate::numerics::{Tape, Var};

pub const MAX_GCN_LAYERS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcnConfig {
    pub layers: usize,
    /// Question neighbors sampled per skill.
    pub n_q: usize,
    /// Skill neighbors sampled per question.
    pub n_s: usize,
    /// Divide by the sampled width instead of width + 1 (the self term).
    pub mean_over_width: bool,
    /// Separate weights for question and skill nodes in every layer.
    pub per_type_weights: bool,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            layers: MAX_GCN_LAYERS,
            n_q: 4,
            n_s: 4,
            mean_over_width: false,
            per_type_weights: false,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers > MAX_GCN_LAYERS {
            return Err(GiktError::Config(format!(
                "gcn_layers must be in 0..={MAX_GCN_LAYERS}, got {}",
                self.layers
            )));
        }
        if self.n_q == 0 || self.n_s == 0 {
            return Err(GiktError::Config("n_q and n_s must be at least 1".into()));
        }
        Ok(())
    }
}

/// One layer's weights on the tape. With shared weights both pairs are the same vars.
#[derive(Clone, Copy, Debug)]
pub struct GcnLayerVars {
    pub w_question: Var,
    pub b_question: Var,
    pub w_skill: Var,
    pub b_skill: Var,
}

/// Question and skill tables after propagation.
#[derive(Clone, Copy, Debug)]
pub struct AggregatedEmbeddings {
    pub q_tilde: Var,
    pub s_tilde: Var,
    pub layers_used: usize,
}

/// One graph convolution for a single node type:
/// `relu((x_i·W + Σ_{j ∈ sample(i)} x_j·W) / denom + b)`.
///
/// `self_rows` are the previous-layer embeddings of the nodes being updated,
/// `neighbor_rows` those of the opposite node type, and `table` holds `width`
/// neighbor ids per node. `denom` is `width + 1`, or `width` when `over_width`.
#[allow(clippy::too_many_arguments)]
pub fn gcn_layer(
    tape: &mut Tape,
    self_rows: Var,
    neighbor_rows: Var,
    table: &[usize],
    width: usize,
    w: Var,
    b: Var,
    over_width: bool,
) -> Result<Var> {
    let own = tape.matmul(self_rows, w)?;
    let others = tape.matmul(neighbor_rows, w)?;
    gcn_combine(tape, own, others, table, width, b, over_width)
}

fn gcn_combine(
    tape: &mut Tape,
    own: Var,
    others: Var,
    table: &[usize],
    width: usize,
    b: Var,
    over_width: bool,
) -> Result<Var> {
    let nodes = tape.value(own).rows();
    if width == 0 || table.len() != nodes * width {
        return Err(GiktError::dim("gcn_layer", &[nodes, width], &[table.len()]));
    }
    let gathered = tape.embedding_lookup(others, table)?;
    let summed = tape.segment_sum(gathered, &vec![width; nodes])?;
    let total = tape.add(own, summed)?;
    let denom = if over_width { width } else { width + 1 } as f64;
    let mean = tape.scale(total, 1.0 / denom);
    let pre = tape.add_row(mean, b)?;
    Ok(tape.relu(pre))
}

/// Stack `layers.len()` graph convolutions starting from the raw tables.
/// With no layers the raw tables are returned as-is.
pub fn propagate(
    tape: &mut Tape,
    e_q: Var,
    e_s: Var,
    table: &NeighborTable,
    layers: &[GcnLayerVars],
    over_width: bool,
) -> Result<AggregatedEmbeddings> {
    let (mut xq, mut xs) = (e_q, e_s);
    for l in layers {
        let shared = l.w_question == l.w_skill;
        let q_own = tape.matmul(xq, l.w_question)?;
        let s_for_q = tape.matmul(xs, l.w_question)?;
        let (s_own, q_for_s) = if shared {
            (s_for_q, q_own)
        } else {
            (tape.matmul(xs, l.w_skill)?, tape.matmul(xq, l.w_skill)?)
        };
        let next_q = gcn_combine(
            tape,
            q_own,
            s_for_q,
            &table.question_rows,
            table.question_width,
            l.b_question,
            over_width,
        )?;
        let next_s = gcn_combine(
            tape,
            s_own,
            q_for_s,
            &table.skill_rows,
            table.skill_width,
            l.b_skill,
            over_width,
        )?;
        xq = next_q;
        xs = next_s;
    }
    Ok(AggregatedEmbeddings {
        q_tilde: xq,
        s_tilde: xs,
        layers_used: layers.len(),
    })
}
