//! Social relationship graph inference.
//!
//! Persons in an image become nodes carrying age and gender attributes;
//! ordered pairs of persons become relationship edges. A pair of weight-tied
//! GRUs refines a node-pair state and an edge state per edge, coupling them
//! through pooling at each message-passing step, and task heads predict
//! relationship, domain, age and gender labels.

pub mod error;
pub mod features;
pub mod graph;
pub mod nn;
pub mod srgin;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::{ParamStore, SeededRng, Tape, Tensor, Var};
