use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use srgn_core::features::{FeatureConfig, FeatureProfile};
use srgn_core::graph::{DatasetKind, Vocabs};
use srgn_core::srgin::{ModelConfig, MtlLossSpec, StateInit};
use srgn_core::train::TrainConfig;
use srgn_core::{Error, Result};

use crate::args::GlobalArgs;

/// Everything a run needs, read from `--config` and then overridden by
/// flags.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetKind,
    pub feature_profile: FeatureProfile,
    /// Explicit feature sizes; the profile's otherwise.
    pub feature_dims: Option<FeatureConfig>,
    pub seed: u64,
    /// Hidden size; 32 for desk and 512 for paper when unset.
    pub hidden: Option<usize>,
    pub state_init: StateInit,
    pub cross_edge: bool,
    pub with_scene: bool,
    /// Missing fields take the desk defaults; the whole section defaults
    /// to the profile's settings.
    pub train: Option<TrainConfig>,
    pub loss: Option<MtlLossSpec>,
    /// Share of training graphs held out for validation when no
    /// validation file is given.
    pub val_fraction: f64,
    /// Prototype weight for synthetic features.
    pub correlation: f64,
    pub graphs: Option<PathBuf>,
    pub features: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: DatasetKind::Pipa,
            feature_profile: FeatureProfile::Desk,
            feature_dims: None,
            seed: 0,
            hidden: None,
            state_init: StateInit::Features,
            cross_edge: false,
            with_scene: true,
            train: None,
            loss: None,
            val_fraction: 0.2,
            correlation: 0.9,
            graphs: None,
            features: None,
        }
    }
}

/// Run configuration with every default resolved.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub run: RunConfig,
    pub vocabs: Vocabs,
    pub features: FeatureConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub loss: MtlLossSpec,
}

impl RunConfig {
    pub fn load(args: &GlobalArgs) -> Result<Resolved> {
        let mut run = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(require_path(path)?)?;
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    line: e.line(),
                    message: format!("{}: {e}", path.display()),
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(p) = &args.dataset {
            run.dataset = p.parse()?;
        }
        if let Some(p) = &args.feature_profile {
            run.feature_profile = p.parse()?;
        }
        if let Some(s) = args.seed {
            run.seed = s;
        }
        if args.no_scene {
            run.with_scene = false;
        }
        if args.cross_edge {
            run.cross_edge = true;
        }
        let mut train = run.train.clone().unwrap_or_else(|| TrainConfig::for_profile(run.feature_profile));
        train.seed = run.seed;
        if let Some(t) = args.time_steps {
            train.time_steps = t;
        }
        if let Some(p) = &args.pooling {
            train.pooling = p.parse()?;
        }
        train.validate()?;

        let vocabs = Vocabs::for_dataset(run.dataset);
        let features = run
            .feature_dims
            .unwrap_or_else(|| FeatureConfig::for_profile(run.feature_profile));
        features.validate()?;
        let hidden = run.hidden.unwrap_or(match run.feature_profile {
            FeatureProfile::Desk => 32,
            FeatureProfile::Paper => 512,
        });
        let mut model = ModelConfig::for_vocabs(&vocabs, features, hidden);
        model.time_steps = train.time_steps;
        model.pooling = train.pooling;
        model.state_init = run.state_init;
        model.cross_edge = run.cross_edge;
        model.with_scene = run.with_scene;
        model.validate()?;
        let loss = run.loss.clone().unwrap_or_else(|| MtlLossSpec::for_vocabs(&vocabs));
        loss.validate()?;
        if !(0.0..1.0).contains(&run.val_fraction) {
            return Err(Error::Config(format!("val_fraction must be in [0, 1), got {}", run.val_fraction)));
        }
        Ok(Resolved {
            run,
            vocabs,
            features,
            model,
            train,
            loss,
        })
    }
}

/// Errors unless `path` exists.
pub fn require_path(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::Config(format!("{} does not exist", path.display())))
    }
}

/// The flag value, else the config value, else an error naming `what`.
pub fn pick<'a>(flag: &'a Option<PathBuf>, config: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    let p = flag
        .as_deref()
        .or(config.as_deref())
        .ok_or_else(|| Error::Config(format!("no {what} path given")))?;
    require_path(p)
}
