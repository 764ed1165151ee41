use std::collections::BTreeMap;

use super::Tensor;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub tensor: Tensor,
    pub trainable: bool,
}

/// Named parameters, iterated in lexicographic name order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    params: BTreeMap<String, Param>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a trainable parameter. Names must be unique.
    pub fn register(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<()> {
        self.insert(name.into(), tensor, true)
    }

    pub fn register_frozen(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<()> {
        self.insert(name.into(), tensor, false)
    }

    fn insert(&mut self, name: String, tensor: Tensor, trainable: bool) -> Result<()> {
        if self.params.contains_key(&name) {
            return Err(Error::Config(format!("parameter {name} registered twice")));
        }
        self.params.insert(name, Param { tensor, trainable });
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.params
            .get(name)
            .map(|p| &p.tensor)
            .ok_or_else(|| Error::Contract(format!("unknown parameter {name}")))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Tensor> {
        self.params
            .get_mut(name)
            .map(|p| &mut p.tensor)
            .ok_or_else(|| Error::Contract(format!("unknown parameter {name}")))
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.get(name)
    }

    pub fn set_trainable(&mut self, name: &str, trainable: bool) -> Result<()> {
        let p = self
            .params
            .get_mut(name)
            .ok_or_else(|| Error::Contract(format!("unknown parameter {name}")))?;
        p.trainable = trainable;
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Param)> {
        self.params.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Param)> {
        self.params.iter_mut().map(|(k, v)| (k.as_str(), v))
    }

    /// Resets every gradient buffer to zeros.
    pub fn zero_grad(&mut self) {
        for p in self.params.values_mut() {
            p.tensor.zero_grad();
        }
    }

    /// Total number of scalar values across all parameters.
    pub fn num_values(&self) -> usize {
        self.params.values().map(|p| p.tensor.len()).sum()
    }

    /// Copies values from `other` for every shared name; shapes must match.
    pub fn copy_values_from(&mut self, other: &ParamStore) -> Result<()> {
        for (name, p) in self.params.iter_mut() {
            if let Some(src) = other.params.get(name) {
                if src.tensor.shape() != p.tensor.shape() {
                    return Err(Error::dim("copy_values_from", p.tensor.shape(), src.tensor.shape()));
                }
                p.tensor.data_mut().copy_from_slice(src.tensor.data());
            }
        }
        Ok(())
    }
}
