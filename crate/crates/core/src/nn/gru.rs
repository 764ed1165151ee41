use crate::error::{Error, Result};
use crate::tensor::{ParamStore, Tape, Tensor, Var};

/// Gated recurrent unit.
///
/// ```text
/// r  = sigmoid(W_r [h, x] + b_r)
/// z  = sigmoid(W_z [h, x] + b_z)
/// h~ = tanh(W x + U (r * h) + b_h)
/// h' = (1 - z) * h + z * h~
/// ```
///
/// The concatenation is hidden-then-input. With zero biases this is the
/// bias-free formulation exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GruCell {
    name: String,
    hidden: usize,
    input: usize,
    bias: bool,
}

/// Values produced by one [`GruCell::step`], kept for inspection.
#[derive(Clone, Copy, Debug)]
pub struct GruStep {
    pub h_next: Var,
    pub reset: Var,
    pub update: Var,
    pub candidate: Var,
}

impl GruCell {
    pub fn new(name: impl Into<String>, hidden: usize, input: usize, bias: bool) -> Self {
        GruCell {
            name: name.into(),
            hidden,
            input,
            bias,
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden
    }

    pub fn input_size(&self) -> usize {
        self.input
    }

    pub fn param_name(&self, part: &str) -> String {
        format!("{}.{part}", self.name)
    }

    pub fn register(&self, store: &mut ParamStore) -> Result<()> {
        if self.hidden == 0 || self.input == 0 {
            return Err(Error::Config(format!("GRU {} has an empty dimension", self.name)));
        }
        let (h, i) = (self.hidden, self.input);
        store.register(self.param_name("w_r"), Tensor::zeros(&[h, h + i]))?;
        store.register(self.param_name("w_z"), Tensor::zeros(&[h, h + i]))?;
        store.register(self.param_name("w"), Tensor::zeros(&[h, i]))?;
        store.register(self.param_name("u"), Tensor::zeros(&[h, h]))?;
        if self.bias {
            for b in ["b_r", "b_z", "b_h"] {
                store.register(self.param_name(b), Tensor::zeros(&[h]))?;
            }
        }
        Ok(())
    }

    fn biased(&self, tape: &mut Tape, store: &ParamStore, v: Var, bias: &str) -> Result<Var> {
        if self.bias {
            let b = tape.param(store, &self.param_name(bias))?;
            tape.add(v, b)
        } else {
            Ok(v)
        }
    }

    pub fn step(&self, tape: &mut Tape, store: &ParamStore, h_prev: Var, x: Var) -> Result<GruStep> {
        let (hl, xl) = (tape.value(h_prev).shape().to_vec(), tape.value(x).shape().to_vec());
        if hl != [self.hidden] || xl != [self.input] {
            return Err(Error::dim("gru_step", &hl, &xl));
        }
        let hx = tape.concat(h_prev, x)?;

        let w_r = tape.param(store, &self.param_name("w_r"))?;
        let pre_r = tape.matvec(w_r, hx)?;
        let pre_r = self.biased(tape, store, pre_r, "b_r")?;
        let reset = tape.sigmoid(pre_r);

        let w_z = tape.param(store, &self.param_name("w_z"))?;
        let pre_z = tape.matvec(w_z, hx)?;
        let pre_z = self.biased(tape, store, pre_z, "b_z")?;
        let update = tape.sigmoid(pre_z);

        let w = tape.param(store, &self.param_name("w"))?;
        let u = tape.param(store, &self.param_name("u"))?;
        let wx = tape.matvec(w, x)?;
        let gated = tape.hadamard(reset, h_prev)?;
        let ug = tape.matvec(u, gated)?;
        let pre_c = tape.add(wx, ug)?;
        let pre_c = self.biased(tape, store, pre_c, "b_h")?;
        let candidate = tape.tanh(pre_c);

        let keep = tape.one_minus(update);
        let kept = tape.hadamard(keep, h_prev)?;
        let fresh = tape.hadamard(update, candidate)?;
        let h_next = tape.add(kept, fresh)?;
        Ok(GruStep {
            h_next,
            reset,
            update,
            candidate,
        })
    }
}
