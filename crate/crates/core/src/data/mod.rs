//! Ingest, splitting, quantile binning and on-disk formats.

mod binning;
mod csv_io;
mod dataset;
mod split;
pub mod tensor;

pub use binning::{bin_features, compute_bins, BinnedMatrix, FeatureBins, DEFAULT_MAX_BINS};
pub use csv_io::{
    load_feature_matrix, load_labels, load_probabilities, parse_feature_csv, parse_labels,
    parse_probabilities, save_feature_matrix, write_feature_csv, write_probabilities,
};
pub use dataset::{DataError, LabeledDataset};
pub use split::stratified_split;
pub use tensor::{read_tensor, write_tensor, FeatureMapTensor, TensorError};
