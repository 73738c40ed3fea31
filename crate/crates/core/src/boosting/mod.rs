//! Logistic-loss gradient boosting over the tree module.

mod config;
mod goss;
mod loss;
mod model;
mod train;

pub use config::{BoostParams, GossParams};
pub use goss::{goss_sample, GossSample};
pub use loss::{initial_score, logistic_grad_hess, logloss, mean_logloss, sigmoid};
pub use model::{load_model, save_model, BoostedModel, TrainingMetadata, FORMAT_VERSION};
pub use train::train_gbdt;

use std::path::PathBuf;

use thiserror::Error;

use crate::data::DataError;
use crate::tree::TreeError;

#[derive(Debug, Error)]
pub enum BoostError {
    #[error("training set must contain both classes (positives {positives}, negatives {negatives})")]
    SingleClass { positives: usize, negatives: usize },
    #[error("invalid boosting parameter: {0}")]
    InvalidParams(String),
    #[error("input has {found} features, model expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("unsupported model format_version {0}")]
    Version(u64),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}
