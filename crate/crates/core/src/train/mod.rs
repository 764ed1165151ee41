//! Training loop, evaluation protocols and the pooling/time-step ablation.

mod config;
mod gradcheck;
mod metrics;
mod report;
mod trainer;

pub use config::TrainConfig;
pub use gradcheck::check_model_gradients;
pub use metrics::{
    average_precision, confusion_matrix, mean_ap, per_class_precision, relationship_pairs, srggen_accuracy,
    srrec_accuracy, SrgGenMode,
};
pub use report::{ablate, evaluate, AblationRow, AblationSetup, AblationTable, EvalReport};
pub use trainer::{dataset_loss, predict_all, sgd_step, split_graphs, train, EpochRecord, TrainOutcome};
