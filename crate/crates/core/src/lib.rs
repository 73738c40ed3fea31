//! Gradient-boosted decision trees over deep-feature vectors.
//!
//! Three growth flavors (level-wise, leaf-wise with optional gradient-based
//! one-side sampling, oblivious), soft-voting ensembles, binary evaluation
//! metrics with ROC/AUC, and Grad-CAM heatmap math over exported activation
//! and gradient tensors.

pub mod boosting;
pub mod cli;
pub mod data;
pub mod ensemble;
pub mod gradcam;
pub mod grid;
pub mod metrics;
pub mod tree;
mod fsutil;
mod rng;

pub use rng::SeededRng;
