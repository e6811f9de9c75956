//! Supervised detection of false-state injection: labeled dataset
//! generation, five lightweight classifier families trained from scratch,
//! and binary plus fine-grained (which station?) evaluation.

mod boost;
mod dataset;
mod forest;
mod metrics;
mod mlp;
mod model;
mod svm;
mod tree;

pub use boost::{BoostParams, GradientBoostModel};
pub use dataset::{collect_states, gen_dataset, Dataset, LabeledSample, Split};
pub use forest::{ForestParams, RandomForestModel};
pub use metrics::{f_measure, ClassMetrics, ConfusionMatrix, MetricsReport};
pub use mlp::{MlpModel, MlpParams};
pub use model::{
    evaluate, evaluate_on, per_station_scores, train, train_per_station, ClassifierKind,
    ClassifierModel, DetectParams,
};
pub use svm::{LinearSvmModel, SvmParams};
pub use tree::{DecisionTreeModel, RegressionTree, TreeParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("training data contains fewer than two classes")]
    SingleClass,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("fine-grained generation requires single-target attack conditions")]
    MultiTargetLabel,
    #[error("attack grid must include the benign condition")]
    MissingBenignCondition,
    #[error("dataset has no train/test split yet")]
    MissingSplit,
    #[error("cannot train on an empty sample set")]
    EmptyTrainingSet,
    #[error("cannot evaluate on an empty split")]
    EmptySplit,
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Attack(#[from] crate::attack::AttackError),
}
