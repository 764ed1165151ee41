use std::collections::HashMap;

use super::ops::{self, PROB_FLOOR};
use super::{ParamStore, Tensor};
use crate::error::{Error, Result};

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

#[derive(Debug)]
enum Op {
    Leaf,
    Param,
    MatVec(Var, Var),
    Add(Var, Var),
    AddN(Vec<Var>),
    Hadamard(Var, Var),
    OneMinus(Var),
    Scale(Var, f64),
    Sigmoid(Var),
    Tanh(Var),
    Concat(Var, Var),
    MeanPool(Var, Var),
    MaxPool(Var, Var),
    Softmax(Var),
    CrossEntropy { probs: Var, label: usize, weight: f64 },
    SumAll(Var),
    /// Elementwise map with caller-supplied local derivatives.
    Map { input: Var, derivative: Vec<f64> },
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
}

/// Linear record of a forward computation, replayed in reverse by
/// [`Tape::backward`].
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    params: HashMap<String, Var>,
}

/// Gradients of a scalar with respect to every recorded value.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn get(&self, var: Var) -> Option<&[f64]> {
        self.grads.get(var.0).and_then(|g| g.as_deref())
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, var: Var) -> &Tensor {
        &self.nodes[var.0].value
    }

    /// Records a constant input.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf)
    }

    /// Reads a parameter from `store` onto the tape. Repeated reads of the
    /// same name return the same handle.
    pub fn param(&mut self, store: &ParamStore, name: &str) -> Result<Var> {
        if let Some(&v) = self.params.get(name) {
            return Ok(v);
        }
        let mut value = store.get(name)?.clone();
        value.clear_grad();
        let v = self.push(value, Op::Param);
        self.params.insert(name.to_owned(), v);
        Ok(v)
    }

    pub fn matvec(&mut self, w: Var, x: Var) -> Result<Var> {
        let out = ops::matvec(self.value(w), self.value(x))?;
        Ok(self.push(out, Op::MatVec(w, x)))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = ops::add(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::Add(a, b)))
    }

    /// Sum of equally shaped values, accumulated left to right.
    pub fn add_n(&mut self, inputs: &[Var]) -> Result<Var> {
        let first = inputs
            .first()
            .ok_or_else(|| Error::Contract("add_n of no inputs".into()))?;
        let mut acc = self.value(*first).clone();
        for v in &inputs[1..] {
            acc = ops::add(&acc, self.value(*v))?;
        }
        Ok(self.push(acc, Op::AddN(inputs.to_vec())))
    }

    pub fn hadamard(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = ops::hadamard(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::Hadamard(a, b)))
    }

    pub fn one_minus(&mut self, a: Var) -> Var {
        let out = ops::one_minus(self.value(a));
        self.push(out, Op::OneMinus(a))
    }

    pub fn scale(&mut self, a: Var, factor: f64) -> Var {
        let out = ops::scale(self.value(a), factor);
        self.push(out, Op::Scale(a, factor))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = ops::sigmoid(self.value(a));
        self.push(out, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = ops::tanh(self.value(a));
        self.push(out, Op::Tanh(a))
    }

    pub fn concat(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = ops::concat(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::Concat(a, b)))
    }

    pub fn mean_pool(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = ops::mean_pool(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::MeanPool(a, b)))
    }

    pub fn max_pool(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = ops::max_pool(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::MaxPool(a, b)))
    }

    pub fn softmax(&mut self, logits: Var) -> Result<Var> {
        let out = ops::softmax(self.value(logits))?;
        Ok(self.push(out, Op::Softmax(logits)))
    }

    /// Scalar cross-entropy of a probability vector against `label`.
    pub fn cross_entropy(&mut self, probs: Var, label: usize, class_weights: Option<&[f64]>) -> Result<Var> {
        let p = self.value(probs);
        let loss = ops::cross_entropy(p, label, class_weights)?;
        let weight = ops::class_weight(class_weights, label, p.len())?;
        Ok(self.push(Tensor::scalar(loss), Op::CrossEntropy { probs, label, weight }))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let out = Tensor::scalar(ops::sum(self.value(a)));
        self.push(out, Op::SumAll(a))
    }

    /// Elementwise `f` with derivative `df`, both evaluated on the input.
    pub fn map(&mut self, a: Var, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Var {
        let input = self.value(a);
        let data = input.data().iter().map(|&x| f(x)).collect();
        let derivative = input.data().iter().map(|&x| df(x)).collect();
        let out = Tensor::new(input.shape().to_vec(), data).expect("shape preserved");
        self.push(out, Op::Map { input: a, derivative })
    }

    /// Reverse sweep from a scalar `loss`.
    pub fn gradients(&self, loss: Var) -> Result<Gradients> {
        if self.value(loss).len() != 1 {
            return Err(Error::Contract(format!(
                "backward on non-scalar of shape {:?}",
                self.value(loss).shape()
            )));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        grads[loss.0] = Some(vec![1.0]);

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            let out = node.value.data();
            match &node.op {
                Op::Leaf | Op::Param => {}
                Op::MatVec(w, x) => {
                    let wv = self.value(*w);
                    let xv = self.value(*x).data();
                    let cols = xv.len();
                    let mut gw = vec![0.0; wv.len()];
                    let mut gx = vec![0.0; cols];
                    for (r, &gr) in g.iter().enumerate() {
                        let row = &wv.data()[r * cols..(r + 1) * cols];
                        let grow = &mut gw[r * cols..(r + 1) * cols];
                        for c in 0..cols {
                            grow[c] = gr * xv[c];
                            gx[c] += gr * row[c];
                        }
                    }
                    accumulate(&mut grads, *w, &gw);
                    accumulate(&mut grads, *x, &gx);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, &g);
                    accumulate(&mut grads, *b, &g);
                }
                Op::AddN(inputs) => {
                    for v in inputs {
                        accumulate(&mut grads, *v, &g);
                    }
                }
                Op::Hadamard(a, b) => {
                    let av = self.value(*a).data();
                    let bv = self.value(*b).data();
                    let ga: Vec<f64> = g.iter().zip(bv).map(|(g, b)| g * b).collect();
                    let gb: Vec<f64> = g.iter().zip(av).map(|(g, a)| g * a).collect();
                    accumulate(&mut grads, *a, &ga);
                    accumulate(&mut grads, *b, &gb);
                }
                Op::OneMinus(a) => {
                    let ga: Vec<f64> = g.iter().map(|g| -g).collect();
                    accumulate(&mut grads, *a, &ga);
                }
                Op::Scale(a, factor) => {
                    let ga: Vec<f64> = g.iter().map(|g| g * factor).collect();
                    accumulate(&mut grads, *a, &ga);
                }
                Op::Sigmoid(a) => {
                    let ga: Vec<f64> = g.iter().zip(out).map(|(g, y)| g * y * (1.0 - y)).collect();
                    accumulate(&mut grads, *a, &ga);
                }
                Op::Tanh(a) => {
                    let ga: Vec<f64> = g.iter().zip(out).map(|(g, y)| g * (1.0 - y * y)).collect();
                    accumulate(&mut grads, *a, &ga);
                }
                Op::Concat(a, b) => {
                    let n = self.value(*a).len();
                    accumulate(&mut grads, *a, &g[..n]);
                    accumulate(&mut grads, *b, &g[n..]);
                }
                Op::MeanPool(a, b) => {
                    let half: Vec<f64> = g.iter().map(|g| g / 2.0).collect();
                    accumulate(&mut grads, *a, &half);
                    accumulate(&mut grads, *b, &half);
                }
                Op::MaxPool(a, b) => {
                    let av = self.value(*a).data();
                    let bv = self.value(*b).data();
                    let mut ga = vec![0.0; g.len()];
                    let mut gb = vec![0.0; g.len()];
                    for i in 0..g.len() {
                        if av[i] >= bv[i] {
                            ga[i] = g[i];
                        } else {
                            gb[i] = g[i];
                        }
                    }
                    accumulate(&mut grads, *a, &ga);
                    accumulate(&mut grads, *b, &gb);
                }
                Op::Softmax(a) => {
                    let dot: f64 = g.iter().zip(out).map(|(g, y)| g * y).sum();
                    let ga: Vec<f64> = g.iter().zip(out).map(|(g, y)| y * (g - dot)).collect();
                    accumulate(&mut grads, *a, &ga);
                }
                Op::CrossEntropy { probs, label, weight } => {
                    let p = self.value(*probs).data();
                    let mut gp = vec![0.0; p.len()];
                    if p[*label] > PROB_FLOOR {
                        gp[*label] = -g[0] * weight / p[*label];
                    }
                    accumulate(&mut grads, *probs, &gp);
                }
                Op::SumAll(a) => {
                    let ga = vec![g[0]; self.value(*a).len()];
                    accumulate(&mut grads, *a, &ga);
                }
                Op::Map { input, derivative } => {
                    let ga: Vec<f64> = g.iter().zip(derivative).map(|(g, d)| g * d).collect();
                    accumulate(&mut grads, *input, &ga);
                }
            }
            grads[idx] = Some(g);
        }
        Ok(Gradients { grads })
    }

    /// Back-propagates `loss` and adds the resulting parameter gradients
    /// into `store`. Every trainable parameter ends with a gradient buffer;
    /// parameters the loss does not reach keep a zero gradient.
    pub fn backward(&self, loss: Var, store: &mut ParamStore) -> Result<()> {
        let grads = self.gradients(loss)?;
        for (name, param) in store.iter_mut() {
            if !param.trainable {
                continue;
            }
            let buf = param.tensor.grad_mut();
            if let Some(g) = self.params.get(name).and_then(|v| grads.get(*v)) {
                for (b, g) in buf.iter_mut().zip(g) {
                    *b += g;
                }
            }
        }
        Ok(())
    }
}

fn accumulate(grads: &mut [Option<Vec<f64>>], var: Var, g: &[f64]) {
    match &mut grads[var.0] {
        Some(existing) => {
            for (e, v) in existing.iter_mut().zip(g) {
                *e += v;
            }
        }
        slot @ None => *slot = Some(g.to_vec()),
    }
}
