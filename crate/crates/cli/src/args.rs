use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "srgn", version, about = "Social relationship graph inference")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides applied on top of the JSON config. Flags win.
#[derive(Args, Debug, Default, Clone)]
pub struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// paper or desk.
    #[arg(long, global = true)]
    pub feature_profile: Option<String>,
    /// pipa or pisc.
    #[arg(long, global = true)]
    pub dataset: Option<String>,
    #[arg(long, global = true)]
    pub time_steps: Option<usize>,
    /// mean or max.
    #[arg(long, global = true)]
    pub pooling: Option<String>,
    /// Drop scene features from the edge input.
    #[arg(long, global = true)]
    pub no_scene: bool,
    /// Feed neighbouring edge states into node-pair inputs.
    #[arg(long, global = true)]
    pub cross_edge: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Turn face annotations into validated graphs.
    Prepare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic labelled dataset with matching features.
    Synth {
        #[arg(long)]
        out_graphs: PathBuf,
        #[arg(long)]
        out_features: PathBuf,
        /// Reuse these graphs instead of generating new ones.
        #[arg(long)]
        graphs: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        images: usize,
        #[arg(long, default_value_t = 2)]
        min_persons: usize,
        #[arg(long, default_value_t = 4)]
        max_persons: usize,
        /// Weight of the class prototype against noise, in [0, 1].
        #[arg(long)]
        correlation: Option<f64>,
    },
    /// Train a model and write its best checkpoint.
    Train {
        #[command(flatten)]
        data: DataArgs,
        /// Validation graphs; a seeded split of the training graphs otherwise.
        #[arg(long)]
        val_graphs: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-epoch JSON-lines log.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Score a checkpoint against labelled graphs.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Report path; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict labels for every graph.
    Infer {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare analytic and finite-difference gradients on a small model.
    Gradcheck {
        #[arg(long, default_value_t = 16)]
        hidden: usize,
        #[arg(long, default_value_t = 8)]
        feature_dim: usize,
        #[arg(long, default_value_t = 3)]
        persons: usize,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Full JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Train one model per pooling and time-step setting.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_values_t = ["max".to_string(), "mean".to_string()])]
        poolings: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
        steps: Vec<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        /// JSON table path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    #[arg(long)]
    pub graphs: Option<PathBuf>,
    #[arg(long)]
    pub features: Option<PathBuf>,
}
