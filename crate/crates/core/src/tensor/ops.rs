//! Forward kernels shared by the tape and by gradient-free callers.

use super::Tensor;
use crate::error::{Error, Result};

/// Smallest probability admitted inside the logarithm of [`cross_entropy`].
pub const PROB_FLOOR: f64 = 1e-12;

fn require_vector(op: &'static str, t: &Tensor) -> Result<()> {
    if t.rank() != 1 {
        return Err(Error::dim(op, t.shape(), &[t.len()]));
    }
    Ok(())
}

fn require_same(op: &'static str, a: &Tensor, b: &Tensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::dim(op, a.shape(), b.shape()));
    }
    Ok(())
}

fn zip_with(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::new(a.shape().to_vec(), data).expect("shape preserved")
}

fn map(a: &Tensor, f: impl Fn(f64) -> f64) -> Tensor {
    let data = a.data().iter().map(|&x| f(x)).collect();
    Tensor::new(a.shape().to_vec(), data).expect("shape preserved")
}

pub fn matvec(w: &Tensor, x: &Tensor) -> Result<Tensor> {
    require_vector("matvec", x)?;
    if w.rank() != 2 || w.shape()[1] != x.len() {
        return Err(Error::dim("matvec", w.shape(), x.shape()));
    }
    let cols = w.shape()[1];
    let out = w
        .data()
        .chunks_exact(cols.max(1))
        .take(w.shape()[0])
        .map(|row| row.iter().zip(x.data()).map(|(a, b)| a * b).sum())
        .collect();
    Ok(Tensor::vector(out))
}

pub fn logistic(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(x: &Tensor) -> Tensor {
    map(x, logistic)
}

pub fn tanh(x: &Tensor) -> Tensor {
    map(x, f64::tanh)
}

pub fn add(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    require_same("add", a, b)?;
    Ok(zip_with(a, b, |x, y| x + y))
}

pub fn hadamard(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    require_same("hadamard", a, b)?;
    Ok(zip_with(a, b, |x, y| x * y))
}

pub fn one_minus(a: &Tensor) -> Tensor {
    map(a, |x| 1.0 - x)
}

pub fn scale(a: &Tensor, factor: f64) -> Tensor {
    map(a, |x| x * factor)
}

pub fn concat(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    require_vector("concat", a)?;
    require_vector("concat", b)?;
    let mut data = Vec::with_capacity(a.len() + b.len());
    data.extend_from_slice(a.data());
    data.extend_from_slice(b.data());
    Ok(Tensor::vector(data))
}

/// Elementwise `(a + b) / 2`.
pub fn mean_pool(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    require_same("mean_pool", a, b)?;
    Ok(zip_with(a, b, |x, y| (x + y) / 2.0))
}

pub fn max_pool(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    require_same("max_pool", a, b)?;
    Ok(zip_with(a, b, f64::max))
}

/// Max-subtracted softmax over a vector.
pub fn softmax(logits: &Tensor) -> Result<Tensor> {
    require_vector("softmax", logits)?;
    if logits.is_empty() {
        return Err(Error::dim("softmax", logits.shape(), &[1]));
    }
    let max = logits.data().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.data().iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Ok(Tensor::vector(exps.into_iter().map(|e| e / total).collect()))
}

/// `-weight[label] * ln(max(probs[label], PROB_FLOOR))`.
pub fn cross_entropy(probs: &Tensor, label: usize, class_weights: Option<&[f64]>) -> Result<f64> {
    require_vector("cross_entropy", probs)?;
    if label >= probs.len() {
        return Err(Error::Label(format!(
            "label {label} out of range for {} classes",
            probs.len()
        )));
    }
    let weight = class_weight(class_weights, label, probs.len())?;
    Ok(-weight * probs.data()[label].max(PROB_FLOOR).ln())
}

pub(crate) fn class_weight(weights: Option<&[f64]>, label: usize, classes: usize) -> Result<f64> {
    match weights {
        None => Ok(1.0),
        Some(w) if w.len() != classes => Err(Error::dim("class_weights", &[w.len()], &[classes])),
        Some(w) if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) => {
            Err(Error::Config("class weights must be positive".into()))
        }
        Some(w) => Ok(w[label]),
    }
}

pub fn sum(a: &Tensor) -> f64 {
    a.data().iter().sum()
}
