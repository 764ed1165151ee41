use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{SeededRng, Tape, Tensor, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    Eval,
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Config(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    Ok(())
}

/// Inverted-dropout mask: each entry is 0 with probability `rate`, else
/// `1 / (1 - rate)`.
pub fn dropout_mask(len: usize, rate: f64, rng: &mut SeededRng) -> Result<Tensor> {
    check_rate(rate)?;
    let keep = 1.0 / (1.0 - rate);
    Ok(Tensor::vector(
        (0..len).map(|_| if rng.bernoulli(rate) { 0.0 } else { keep }).collect(),
    ))
}

/// Identity in eval mode or at rate 0; otherwise multiplies by a fresh mask.
pub fn dropout(tape: &mut Tape, x: Var, rate: f64, mode: Mode, rng: &mut SeededRng) -> Result<Var> {
    check_rate(rate)?;
    if mode == Mode::Eval || rate == 0.0 {
        return Ok(x);
    }
    let mask = dropout_mask(tape.value(x).len(), rate, rng)?;
    let mask = tape.constant(mask);
    tape.hadamard(x, mask)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(x: Vec<f64>, rate: f64, mode: Mode, seed: u64) -> Result<Vec<f64>> {
        let mut tape = Tape::new();
        let v = tape.constant(Tensor::vector(x));
        let mut rng = SeededRng::new(seed);
        let y = dropout(&mut tape, v, rate, mode, &mut rng)?;
        Ok(tape.value(y).data().to_vec())
    }

    #[test]
    fn identity_cases() {
        let x = vec![0.5, -1.0, 2.0];
        assert_eq!(apply(x.clone(), 0.0, Mode::Train, 1).unwrap(), x);
        assert_eq!(apply(x.clone(), 0.7, Mode::Eval, 1).unwrap(), x);
    }

    #[test]
    fn rate_one_rejected() {
        assert!(matches!(apply(vec![1.0], 1.0, Mode::Train, 1), Err(Error::Config(_))));
        assert!(matches!(apply(vec![1.0], -0.1, Mode::Eval, 1), Err(Error::Config(_))));
    }

    #[test]
    fn survivor_fraction_and_mean() {
        let n = 10_000;
        let y = apply(vec![1.0; n], 0.5, Mode::Train, 3).unwrap();
        let survivors = y.iter().filter(|v| **v != 0.0).count() as f64 / n as f64;
        assert!((survivors - 0.5).abs() < 0.05, "{survivors}");
        // each entry is 0 or 2: mean 1, std 1, so 3 sigma of the mean is 0.03
        let mean = y.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{mean}");
    }
}
