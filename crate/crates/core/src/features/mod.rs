//! Dataset geometry and the feature-provider layer.
//!
//! Convolutional backbones are not part of this crate. Their outputs are
//! modelled as per-person attribute vectors (age, gender, clothing) and
//! per-edge context vectors (activity, scene), read from a feature file or
//! produced by the seeded synthetic generator.

mod assemble;
mod bundle;
mod config;
mod file;
mod geometry;
mod synth;

pub use assemble::{assemble_ppair, assemble_rship};
pub use bundle::{EdgeFeatures, FeatureBundle, PersonFeatures, Role};
pub use config::{FeatureConfig, FeatureProfile};
pub use file::{read_features, write_features, FEATURE_MAGIC, FEATURE_VERSION};
pub use geometry::{context_box, expand_face_box, CONTEXT_RESIZE, SINGLE_BODY_RESIZE};
pub use synth::{synth_features, synth_features_all, synth_graphs, SynthGraphSpec};
