use super::LstmLayerVars;
use crate::error::Result;
use crate::numerics::{Tape, Var};

/// `relu([q̃, a]·W + b)` for every row of `q_rows` and its answer id.
pub fn encode_exercise(
    tape: &mut Tape,
    q_rows: Var,
    answers: &[usize],
    answer_embed: Var,
    w: Var,
    b: Var,
) -> Result<Var> {
    let a_rows = tape.embedding_lookup(answer_embed, answers)?;
    let joined = tape.concat(&[q_rows, a_rows], 1)?;
    let lin = tape.matmul(joined, w)?;
    let pre = tape.add_row(lin, b)?;
    Ok(tape.relu(pre))
}

fn affine(tape: &mut Tape, x: Var, w: Var, b: Var) -> Result<Var> {
    let lin = tape.matmul(x, w)?;
    tape.add_row(lin, b)
}

/// One LSTM step over a batch of rows. The three gates see the previous cell
/// state as well as the input and hidden state; the candidate does not.
pub fn lstm_step(
    tape: &mut Tape,
    x: Var,
    h_prev: Var,
    c_prev: Var,
    layer: &LstmLayerVars,
) -> Result<(Var, Var)> {
    let gate_in = tape.concat(&[x, h_prev, c_prev], 1)?;
    let i = affine(tape, gate_in, layer.w_input, layer.b_input)?;
    let i = tape.sigmoid(i);
    let f = affine(tape, gate_in, layer.w_forget, layer.b_forget)?;
    let f = tape.sigmoid(f);
    let o = affine(tape, gate_in, layer.w_output, layer.b_output)?;
    let o = tape.sigmoid(o);
    let cand_in = tape.concat(&[x, h_prev], 1)?;
    let g = affine(tape, cand_in, layer.w_cell, layer.b_cell)?;
    let g = tape.tanh(g);
    let keep = tape.mul(f, c_prev)?;
    let write = tape.mul(i, g)?;
    let c = tape.add(keep, write)?;
    let tc = tape.tanh(c);
    let h = tape.mul(o, tc)?;
    Ok((h, c))
}

/// A whole LSTM layer over packed time-major rows: step `t` holds
/// `active[t]` rows, a non-increasing prefix of the slots of step `t - 1`.
///
/// Equal to repeated [`lstm_step`] up to summation order: the input part of
/// every gate is projected for all steps at once and the recurrent parts of
/// the three gates share one product.
pub fn lstm_layer(
    tape: &mut Tape,
    input: Var,
    active: &[usize],
    layer: &LstmLayerVars,
) -> Result<Var> {
    let h_dim = layer.hidden;
    let in_dim = tape.value(input).cols();
    let gates_w = tape.concat(&[layer.w_input, layer.w_forget, layer.w_output], 1)?;
    let gates_x = tape.slice_rows(gates_w, 0, in_dim)?;
    let gates_hc = tape.slice_rows(gates_w, in_dim, 2 * h_dim)?;
    let gates_b = tape.concat(&[layer.b_input, layer.b_forget, layer.b_output], 0)?;
    let cell_x = tape.slice_rows(layer.w_cell, 0, in_dim)?;
    let cell_h = tape.slice_rows(layer.w_cell, in_dim, h_dim)?;
    let x_gates = affine(tape, input, gates_x, gates_b)?;
    let x_cell = affine(tape, input, cell_x, layer.b_cell)?;

    let mut state: Option<(Var, Var)> = None;
    let mut outputs = Vec::with_capacity(active.len());
    let mut at = 0;
    for &n in active {
        let mut pre_g = tape.slice_rows(x_gates, at, n)?;
        let mut pre_c = tape.slice_rows(x_cell, at, n)?;
        at += n;
        let mut c_prev = None;
        if let Some((mut h, mut c)) = state {
            if tape.value(h).rows() > n {
                h = tape.slice_rows(h, 0, n)?;
                c = tape.slice_rows(c, 0, n)?;
            }
            let hc = tape.concat(&[h, c], 1)?;
            let rg = tape.matmul(hc, gates_hc)?;
            pre_g = tape.add(pre_g, rg)?;
            let rc = tape.matmul(h, cell_h)?;
            pre_c = tape.add(pre_c, rc)?;
            c_prev = Some(c);
        }
        let gates = tape.sigmoid(pre_g);
        let i = tape.slice_cols(gates, 0, h_dim)?;
        let o = tape.slice_cols(gates, 2 * h_dim, h_dim)?;
        let g = tape.tanh(pre_c);
        let mut c = tape.mul(i, g)?;
        if let Some(cp) = c_prev {
            let f = tape.slice_cols(gates, h_dim, h_dim)?;
            let keep = tape.mul(f, cp)?;
            c = tape.add(keep, c)?;
        }
        let tc = tape.tanh(c);
        let h = tape.mul(o, tc)?;
        state = Some((h, c));
        outputs.push(h);
    }
    tape.concat(&outputs, 0)
}
