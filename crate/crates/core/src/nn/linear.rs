use crate::error::{Error, Result};
use crate::tensor::{ParamStore, Tape, Tensor, Var};

/// `y = W x (+ b)` with `W` of shape `output x input`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearLayer {
    name: String,
    input: usize,
    output: usize,
    bias: bool,
}

impl LinearLayer {
    pub fn new(name: impl Into<String>, input: usize, output: usize, bias: bool) -> Self {
        LinearLayer {
            name: name.into(),
            input,
            output,
            bias,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_size(&self) -> usize {
        self.input
    }

    pub fn output_size(&self) -> usize {
        self.output
    }

    pub fn has_bias(&self) -> bool {
        self.bias
    }

    pub fn weight_name(&self) -> String {
        format!("{}.weight", self.name)
    }

    pub fn bias_name(&self) -> String {
        format!("{}.bias", self.name)
    }

    /// Registers zero-valued parameters in `store`.
    pub fn register(&self, store: &mut ParamStore) -> Result<()> {
        if self.input == 0 || self.output == 0 {
            return Err(Error::Config(format!("layer {} has an empty dimension", self.name)));
        }
        store.register(self.weight_name(), Tensor::zeros(&[self.output, self.input]))?;
        if self.bias {
            store.register(self.bias_name(), Tensor::zeros(&[self.output]))?;
        }
        Ok(())
    }

    pub fn forward(&self, tape: &mut Tape, store: &ParamStore, x: Var) -> Result<Var> {
        let w = tape.param(store, &self.weight_name())?;
        let y = tape.matvec(w, x)?;
        if self.bias {
            let b = tape.param(store, &self.bias_name())?;
            tape.add(y, b)
        } else {
            Ok(y)
        }
    }
}
