//! The graph inference network.
//!
//! Every edge `i -> j` carries two recurrent states. The node-pair state is
//! driven by the concatenated attribute features of `i` and `j`; the edge
//! state by the edge's activity and scene features. After each GRU update
//! the edge state is replaced by the pool (mean by default) of the fresh
//! edge and node-pair states. Relationship and domain heads read the final
//! edge state; age and gender heads read the raw attribute features.

mod config;
mod loss;
mod model;

pub use config::{ModelConfig, Pooling, StateInit};
pub use loss::{mtl_loss, LossOutput, MtlLossSpec};
pub use model::{
    EpisodeStates, ForwardOutput, GraphInputs, Prediction, SrgInModel, StateVars, StepStates,
};
