use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::{ParamStore, SeededRng};

#[derive(Clone, Debug, PartialEq)]
pub enum InitScheme {
    /// Matrices from `U(-a, a)`, `a = sqrt(6 / (fan_in + fan_out))`; vectors zero.
    GlorotUniform,
    Zeros,
    Constant(f64),
}

impl FromStr for InitScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "glorot-uniform" | "glorot" => Ok(InitScheme::GlorotUniform),
            "zeros" => Ok(InitScheme::Zeros),
            other => other
                .strip_prefix("constant(")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|c| c.trim().parse().ok())
                .map(InitScheme::Constant)
                .ok_or_else(|| Error::Config(format!("unknown init scheme {other:?}"))),
        }
    }
}

impl fmt::Display for InitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitScheme::GlorotUniform => f.write_str("glorot-uniform"),
            InitScheme::Zeros => f.write_str("zeros"),
            InitScheme::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

/// Overwrites every parameter in `store`. Each parameter draws from its own
/// stream derived from `seed` and its name, so the result does not depend
/// on which other parameters exist.
pub fn init_params(store: &mut ParamStore, scheme: &InitScheme, seed: u64) -> Result<()> {
    for (name, param) in store.iter_mut() {
        let t = &mut param.tensor;
        match scheme {
            InitScheme::Zeros => t.data_mut().fill(0.0),
            InitScheme::Constant(c) => t.data_mut().fill(*c),
            InitScheme::GlorotUniform if t.rank() == 2 => {
                let (fan_out, fan_in) = (t.shape()[0], t.shape()[1]);
                let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut rng = SeededRng::derive(seed, name);
                for v in t.data_mut() {
                    *v = rng.uniform(-a, a);
                }
            }
            InitScheme::GlorotUniform => t.data_mut().fill(0.0),
        }
    }
    Ok(())
}

/// Glorot-uniform matrices and zero biases.
pub fn init_default(store: &mut ParamStore, seed: u64) -> Result<()> {
    init_params(store, &InitScheme::GlorotUniform, seed)
}
