use serde::{Deserialize, Serialize};

use super::ModelConfig;
use crate::error::{GiktError, Result};
use crate::graph::GcnLayerVars;
use crate::numerics::{embedding_uniform, glorot_uniform, Tape, Tensor, Var};
use crate::rng::Rng;

/// Weights of one graph-convolution layer, stored `[d_in × d_out]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GcnLayerParams {
    pub w: Tensor,
    pub b: Tensor,
    /// Present only with per-type weights; `w`/`b` then serve question nodes.
    pub skill: Option<(Tensor, Tensor)>,
}

/// One LSTM layer. Gate weights read `[x_t, h_{t-1}, c_{t-1}]`, the cell
/// candidate reads `[x_t, h_{t-1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmLayerParams {
    pub w_input: Tensor,
    pub w_forget: Tensor,
    pub w_output: Tensor,
    pub w_cell: Tensor,
    pub b_input: Tensor,
    pub b_forget: Tensor,
    pub b_output: Tensor,
    pub b_cell: Tensor,
}

impl LstmLayerParams {
    pub fn hidden(&self) -> usize {
        self.w_cell.shape()[1]
    }

    pub fn input(&self) -> usize {
        self.w_cell.shape()[0] - self.hidden()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GiktParams {
    pub question_embed: Tensor,
    pub skill_embed: Tensor,
    /// Row 0 is an incorrect answer, row 1 a correct one.
    pub answer_embed: Tensor,
    pub gcn: Vec<GcnLayerParams>,
    pub encoder_w: Tensor,
    pub encoder_b: Tensor,
    pub lstm: Vec<LstmLayerParams>,
    /// Scores `[f_i, f_j]` for the pair attention, `[2d × 1]`.
    pub attention_w: Tensor,
    pub attention_b: Tensor,
}

impl GiktParams {
    pub fn init(config: &ModelConfig, question_count: usize, skill_count: usize, rng: &mut Rng) -> Self {
        let d = config.embed_dim;
        let question_embed = embedding_uniform(question_count, d, rng);
        let skill_embed = embedding_uniform(skill_count, d, rng);
        let answer_embed = embedding_uniform(2, d, rng);
        let gcn = (0..config.gcn.layers)
            .map(|_| GcnLayerParams {
                w: glorot_uniform(d, d, rng),
                b: Tensor::zeros(&[d]),
                skill: config
                    .gcn
                    .per_type_weights
                    .then(|| (glorot_uniform(d, d, rng), Tensor::zeros(&[d]))),
            })
            .collect();
        let encoder_w = glorot_uniform(2 * d, d, rng);
        let encoder_b = Tensor::zeros(&[d]);
        let mut lstm = Vec::with_capacity(config.lstm_sizes.len());
        let mut input = d;
        for &h in &config.lstm_sizes {
            let gate_in = input + 2 * h;
            lstm.push(LstmLayerParams {
                w_input: glorot_uniform(gate_in, h, rng),
                w_forget: glorot_uniform(gate_in, h, rng),
                w_output: glorot_uniform(gate_in, h, rng),
                w_cell: glorot_uniform(input + h, h, rng),
                b_input: Tensor::zeros(&[h]),
                b_forget: Tensor::zeros(&[h]),
                b_output: Tensor::zeros(&[h]),
                b_cell: Tensor::zeros(&[h]),
            });
            input = h;
        }
        let attention_w = glorot_uniform(2 * d, 1, rng);
        let attention_b = Tensor::zeros(&[1]);
        GiktParams {
            question_embed,
            skill_embed,
            answer_embed,
            gcn,
            encoder_w,
            encoder_b,
            lstm,
            attention_w,
            attention_b,
        }
    }

    pub fn embed_dim(&self) -> usize {
        self.question_embed.cols()
    }

    /// Every tensor with its stable name, in registration order.
    pub fn named(&self) -> Vec<(String, &Tensor)> {
        let mut out: Vec<(String, &Tensor)> = vec![
            ("question_embed".into(), &self.question_embed),
            ("skill_embed".into(), &self.skill_embed),
            ("answer_embed".into(), &self.answer_embed),
        ];
        for (l, g) in self.gcn.iter().enumerate() {
            out.push((format!("gcn.{l}.w"), &g.w));
            out.push((format!("gcn.{l}.b"), &g.b));
            if let Some((w, b)) = &g.skill {
                out.push((format!("gcn.{l}.w_skill"), w));
                out.push((format!("gcn.{l}.b_skill"), b));
            }
        }
        out.push(("encoder.w".into(), &self.encoder_w));
        out.push(("encoder.b".into(), &self.encoder_b));
        for (l, p) in self.lstm.iter().enumerate() {
            out.push((format!("lstm.{l}.w_input"), &p.w_input));
            out.push((format!("lstm.{l}.w_forget"), &p.w_forget));
            out.push((format!("lstm.{l}.w_output"), &p.w_output));
            out.push((format!("lstm.{l}.w_cell"), &p.w_cell));
            out.push((format!("lstm.{l}.b_input"), &p.b_input));
            out.push((format!("lstm.{l}.b_forget"), &p.b_forget));
            out.push((format!("lstm.{l}.b_output"), &p.b_output));
            out.push((format!("lstm.{l}.b_cell"), &p.b_cell));
        }
        out.push(("attention.w".into(), &self.attention_w));
        out.push(("attention.b".into(), &self.attention_b));
        out
    }

    /// Mutable view in the same order as [`GiktParams::named`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = vec![
            &mut self.question_embed,
            &mut self.skill_embed,
            &mut self.answer_embed,
        ];
        for g in &mut self.gcn {
            out.push(&mut g.w);
            out.push(&mut g.b);
            if let Some((w, b)) = &mut g.skill {
                out.push(w);
                out.push(b);
            }
        }
        out.push(&mut self.encoder_w);
        out.push(&mut self.encoder_b);
        for p in &mut self.lstm {
            out.extend([
                &mut p.w_input,
                &mut p.w_forget,
                &mut p.w_output,
                &mut p.w_cell,
                &mut p.b_input,
                &mut p.b_forget,
                &mut p.b_output,
                &mut p.b_cell,
            ]);
        }
        out.push(&mut self.attention_w);
        out.push(&mut self.attention_b);
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.named().iter().map(|(_, t)| t.len()).sum()
    }

    /// Put every tensor on the tape, as trainable leaves or constants.
    pub fn bind(&self, tape: &mut Tape, trainable: bool) -> BoundParams {
        let vars: Vec<Var> = self
            .named()
            .into_iter()
            .map(|(_, t)| {
                if trainable {
                    tape.param(t.clone())
                } else {
                    tape.constant(t.clone())
                }
            })
            .collect();
        self.bind_vars(&vars).expect("one handle per tensor")
    }

    /// Wrap existing handles, given in [`GiktParams::named`] order.
    pub fn bind_vars(&self, vars: &[Var]) -> Result<BoundParams> {
        let expected = self.named().len();
        if vars.len() != expected {
            return Err(GiktError::Contract(format!(
                "expected {expected} parameter handles, got {}",
                vars.len()
            )));
        }
        let mut it = vars.iter().copied();
        let mut next = || it.next().expect("length checked");
        let question_embed = next();
        let skill_embed = next();
        let answer_embed = next();
        let gcn = self
            .gcn
            .iter()
            .map(|g| {
                let (w, b) = (next(), next());
                let (ws, bs) = if g.skill.is_some() { (next(), next()) } else { (w, b) };
                GcnLayerVars {
                    w_question: w,
                    b_question: b,
                    w_skill: ws,
                    b_skill: bs,
                }
            })
            .collect();
        let encoder_w = next();
        let encoder_b = next();
        let lstm = self
            .lstm
            .iter()
            .map(|p| LstmLayerVars {
                w_input: next(),
                w_forget: next(),
                w_output: next(),
                w_cell: next(),
                b_input: next(),
                b_forget: next(),
                b_output: next(),
                b_cell: next(),
                hidden: p.hidden(),
            })
            .collect();
        let attention_w = next();
        let attention_b = next();
        Ok(BoundParams {
            question_embed,
            skill_embed,
            answer_embed,
            gcn,
            encoder_w,
            encoder_b,
            lstm,
            attention_w,
            attention_b,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LstmLayerVars {
    pub w_input: Var,
    pub w_forget: Var,
    pub w_output: Var,
    pub w_cell: Var,
    pub b_input: Var,
    pub b_forget: Var,
    pub b_output: Var,
    pub b_cell: Var,
    pub hidden: usize,
}

/// [`GiktParams`] as tape handles.
#[derive(Clone, Debug)]
pub struct BoundParams {
    pub question_embed: Var,
    pub skill_embed: Var,
    pub answer_embed: Var,
    pub gcn: Vec<GcnLayerVars>,
    pub encoder_w: Var,
    pub encoder_b: Var,
    pub lstm: Vec<LstmLayerVars>,
    pub attention_w: Var,
    pub attention_b: Var,
}

impl BoundParams {
    /// Handles in the order of [`GiktParams::named`].
    pub fn vars(&self) -> Vec<Var> {
        let mut out = vec![self.question_embed, self.skill_embed, self.answer_embed];
        for g in &self.gcn {
            out.push(g.w_question);
            out.push(g.b_question);
            if g.w_skill != g.w_question {
                out.push(g.w_skill);
                out.push(g.b_skill);
            }
        }
        out.push(self.encoder_w);
        out.push(self.encoder_b);
        for p in &self.lstm {
            out.extend([
                p.w_input, p.w_forget, p.w_output, p.w_cell, p.b_input, p.b_forget, p.b_output,
                p.b_cell,
            ]);
        }
        out.push(self.attention_w);
        out.push(self.attention_b);
        out
    }
}
