//! Decision trees grown from binned data with second-order statistics.
//!
//! Every growth strategy scores splits with the same regularized gain:
//!
//! ```text
//! w*(G, H) = -G / (H + lambda)
//! gain     = 1/2 [ G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda) ] - gamma
//! ```

mod grow;
mod model;
mod split;

pub use grow::{grow_leaf_wise, grow_level_wise, grow_oblivious, grow_tree};
pub use model::{Flavor, LevelSplit, Node, SplitRecord, Tree};
pub use split::{
    best_split_histogram, leaf_weight, split_gain, GradPair, GradSum, SplitCandidate, TreeParams,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("leaf weight undefined: H + lambda = {0}")]
    DegenerateHessian(f64),
    #[error("row has {found} features, tree expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid tree parameter: {0}")]
    InvalidParams(String),
    #[error("malformed tree: {0}")]
    Malformed(String),
}
