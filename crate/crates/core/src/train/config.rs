use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureProfile;
use crate::srgin::Pooling;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Target number of edges per mini-batch. Whole graphs are packed until
    /// the target is reached.
    pub batch_size: usize,
    pub l2: f64,
    pub dropout: f64,
    /// Epochs without validation-loss improvement before stopping.
    pub patience: usize,
    pub seed: u64,
    pub time_steps: usize,
    pub pooling: Pooling,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig::desk()
    }
}

impl TrainConfig {
    /// Small-scale defaults for synthetic features.
    pub fn desk() -> Self {
        TrainConfig {
            learning_rate: 1e-2,
            epochs: 200,
            batch_size: 8,
            l2: 0.0,
            dropout: 0.0,
            patience: 200,
            seed: 0,
            time_steps: 2,
            pooling: Pooling::Mean,
        }
    }

    /// Full-scale settings for backbone features.
    pub fn paper() -> Self {
        TrainConfig {
            learning_rate: 1e-6,
            batch_size: 64,
            l2: 5e-4,
            dropout: 0.5,
            patience: 10,
            ..TrainConfig::desk()
        }
    }

    pub fn for_profile(profile: FeatureProfile) -> Self {
        match profile {
            FeatureProfile::Paper => TrainConfig::paper(),
            FeatureProfile::Desk => TrainConfig::desk(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!("learning_rate must be >= 0, got {}", self.learning_rate)));
        }
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Config(format!("l2 must be >= 0, got {}", self.l2)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout must be in [0, 1), got {}", self.dropout)));
        }
        Ok(())
    }
}
