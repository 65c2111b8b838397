//! Early-dropout prediction with boosted regression trees.

mod data;
mod eval;
mod features;
mod train;
pub mod tree;

use alloc::string::String;

use thiserror::Error;

pub use data::FeatureMatrix;
pub use eval::{evaluate, fold_assignment, AccuracyReport, Confusion, FoldResult, N_FOLDS};
pub use features::{
    early_dropout_dataset, extract_features, label_early, window_end, EarlyDataset, FeatureVector, N_FEATURES,
};
pub use train::{
    logistic_grad_hess, logistic_loss, mean_logistic_loss, predict, train, train_first_order, train_second_order,
    BoostedModel, TrainConfig, TrainOutcome, Variant,
};
pub use tree::{RegressionTree, TreeNode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoostError {
    #[error("learner {0:?} never accessed the course")]
    NeverAccessed(String),
    #[error("labels contain a single class")]
    SingleClass,
    #[error("need at least {min} members of each class, got {positives} positive and {negatives} negative")]
    InsufficientClass {
        positives: usize,
        negatives: usize,
        min: usize,
    },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{len} values do not fill rows of {n_cols} columns")]
    Shape { len: usize, n_cols: usize },
    #[error("{rows} feature rows but {labels} labels")]
    LabelCount { rows: usize, labels: usize },
    #[error("features must be finite")]
    NonFinite,
    #[error("invalid config: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
}
