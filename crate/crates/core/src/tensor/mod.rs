//! Dense rank-1/rank-2 `f64` tensors, a recording tape for reverse-mode
//! gradients, named parameter storage and finite-difference checking.

mod gradcheck;
pub mod ops;
mod params;
mod rng;
mod tape;

pub use gradcheck::{grad_check, GradCheckReport, ParamCheck};
pub use params::{Param, ParamStore};
pub use rng::SeededRng;
pub use tape::{Tape, Var};

use crate::error::{Error, Result};

/// A dense row-major array with an optional gradient buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
    grad: Option<Vec<f64>>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() || shape.is_empty() || shape.len() > 2 {
            return Err(Error::dim("Tensor::new", &shape, &[data.len()]));
        }
        Ok(Tensor {
            shape,
            data,
            grad: None,
        })
    }

    pub fn vector(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
            grad: None,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Tensor::vector(vec![value])
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Tensor::new(vec![rows, cols], data)
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Contract("ragged matrix rows".into()));
        }
        Tensor::matrix(rows.len(), cols, rows.concat())
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; n],
            grad: None,
        }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let mut t = Tensor::zeros(shape);
        t.data.fill(value);
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn grad(&self) -> Option<&[f64]> {
        self.grad.as_deref()
    }

    /// Gradient buffer, allocated as zeros on first access.
    pub fn grad_mut(&mut self) -> &mut [f64] {
        let n = self.data.len();
        self.grad.get_or_insert_with(|| vec![0.0; n])
    }

    pub fn zero_grad(&mut self) {
        let n = self.data.len();
        self.grad = Some(vec![0.0; n]);
    }

    pub fn clear_grad(&mut self) {
        self.grad = None;
    }

    /// The single value of a one-element tensor.
    pub fn item(&self) -> Result<f64> {
        match self.data.as_slice() {
            [v] => Ok(*v),
            _ => Err(Error::Contract(format!(
                "item() on tensor of shape {:?}",
                self.shape
            ))),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute element, 0 for empty tensors.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
