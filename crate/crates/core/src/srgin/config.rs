use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::graph::Vocabs;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Mean,
    Max,
}

impl FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Pooling::Mean),
            "max" => Ok(Pooling::Max),
            other => Err(Error::Config(format!("unknown pooling {other:?}, expected mean or max"))),
        }
    }
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Mean => "mean",
            Pooling::Max => "max",
        })
    }
}

/// How the recurrent states start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateInit {
    /// Projected input features.
    #[default]
    Features,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub hidden: usize,
    pub time_steps: usize,
    pub pooling: Pooling,
    pub state_init: StateInit,
    /// Adds the mean of neighbouring edge states to each node-pair input.
    pub cross_edge: bool,
    pub with_scene: bool,
    pub bias: bool,
    pub features: FeatureConfig,
    pub num_relationships: usize,
    pub num_domains: usize,
    pub num_ages: usize,
    pub num_genders: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::for_vocabs(&Vocabs::pipa(), FeatureConfig::paper(), 512)
    }
}

impl ModelConfig {
    pub fn for_vocabs(vocabs: &Vocabs, features: FeatureConfig, hidden: usize) -> Self {
        ModelConfig {
            hidden,
            time_steps: 2,
            pooling: Pooling::Mean,
            state_init: StateInit::Features,
            cross_edge: false,
            with_scene: true,
            bias: true,
            features,
            num_relationships: vocabs.relationship.len(),
            num_domains: vocabs.domain.len(),
            num_ages: vocabs.age.len(),
            num_genders: vocabs.gender.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        let sizes = [
            ("hidden", self.hidden),
            ("num_relationships", self.num_relationships),
            ("num_domains", self.num_domains),
            ("num_ages", self.num_ages),
            ("num_genders", self.num_genders),
        ];
        for (name, v) in sizes {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Errors unless the head sizes match `vocabs`.
    pub fn check_vocabs(&self, vocabs: &Vocabs) -> Result<()> {
        let pairs = [
            ("relationship", self.num_relationships, vocabs.relationship.len()),
            ("domain", self.num_domains, vocabs.domain.len()),
            ("age", self.num_ages, vocabs.age.len()),
            ("gender", self.num_genders, vocabs.gender.len()),
        ];
        for (task, model, vocab) in pairs {
            if model != vocab {
                return Err(Error::Alignment(format!(
                    "model predicts {model} {task} classes but the vocabulary has {vocab}"
                )));
            }
        }
        Ok(())
    }
}
