use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureProfile {
    /// fc7-sized backbone outputs.
    Paper,
    /// Reduced dimensions for laptop-scale runs.
    Desk,
}

impl FromStr for FeatureProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(FeatureProfile::Paper),
            "desk" => Ok(FeatureProfile::Desk),
            other => Err(Error::Config(format!("unknown feature profile {other:?}"))),
        }
    }
}

impl fmt::Display for FeatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureProfile::Paper => "paper",
            FeatureProfile::Desk => "desk",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub dim_age: usize,
    pub dim_gender: usize,
    pub dim_clothing: usize,
    pub dim_activity: usize,
    pub dim_scene: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig::paper()
    }
}

impl FeatureConfig {
    pub fn paper() -> Self {
        FeatureConfig {
            dim_age: 4096,
            dim_gender: 4096,
            dim_clothing: 4096,
            dim_activity: 1024,
            dim_scene: 4096,
        }
    }

    pub fn desk() -> Self {
        FeatureConfig {
            dim_age: 32,
            dim_gender: 32,
            dim_clothing: 32,
            dim_activity: 16,
            dim_scene: 32,
        }
    }

    pub fn for_profile(profile: FeatureProfile) -> Self {
        match profile {
            FeatureProfile::Paper => Self::paper(),
            FeatureProfile::Desk => Self::desk(),
        }
    }

    /// Every vector of length `d`.
    pub fn uniform(d: usize) -> Self {
        FeatureConfig {
            dim_age: d,
            dim_gender: d,
            dim_clothing: d,
            dim_activity: d,
            dim_scene: d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.dim_age, self.dim_gender, self.dim_clothing, self.dim_activity, self.dim_scene];
        if dims.contains(&0) {
            return Err(Error::Config(format!("feature dimensions must be >= 1: {self:?}")));
        }
        Ok(())
    }

    /// Length of one person's attribute vector.
    pub fn ppair_att_dim(&self) -> usize {
        self.dim_age + self.dim_gender + self.dim_clothing
    }

    /// Length of the node-pair input, both persons concatenated.
    pub fn ppair_input_dim(&self) -> usize {
        2 * self.ppair_att_dim()
    }

    pub fn rship_dim(&self, with_scene: bool) -> usize {
        self.dim_activity + if with_scene { self.dim_scene } else { 0 }
    }
}
