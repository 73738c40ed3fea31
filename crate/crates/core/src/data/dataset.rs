use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    Header(String),
    #[error("malformed csv at row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("ragged row {row} (id {id:?}): expected {expected} columns, found {found}")]
    Ragged {
        row: usize,
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("label outside {{0,1}} at row {row} (id {id:?}): {value:?}")]
    Label { row: usize, id: String, value: String },
    #[error("non-numeric value {value:?} at row {row} (id {id:?}), column {column}")]
    NonNumeric {
        row: usize,
        id: String,
        column: String,
        value: String,
    },
    #[error("non-finite value at row {row} (id {id:?}), column {column}")]
    NonFinite {
        row: usize,
        id: String,
        column: String,
    },
    #[error("probability outside [0,1] at row {row} (id {id:?})")]
    Probability { row: usize, id: String },
    #[error("file contains no data rows")]
    Empty,
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("train fraction must lie in (0,1), got {0}")]
    TrainFraction(f64),
    #[error("class {0} has no rows")]
    EmptyClass(u8),
    #[error("max_bins must lie in [2, 65536], got {0}")]
    MaxBins(usize),
}

/// Rows of deep-feature vectors with binary labels (0 = benign, 1 = malignant).
///
/// Features are stored row-major. Construction validates every invariant, so a
/// `LabeledDataset` in hand always has at least one row and one feature, labels
/// in `{0,1}` and finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    ids: Vec<String>,
    labels: Vec<u8>,
    features: Vec<f64>,
    n_features: usize,
}

impl LabeledDataset {
    pub fn new(
        ids: Vec<String>,
        labels: Vec<u8>,
        features: Vec<f64>,
        n_features: usize,
    ) -> Result<Self, DataError> {
        let n_rows = ids.len();
        if n_rows == 0 {
            return Err(DataError::Empty);
        }
        if n_features == 0 {
            return Err(DataError::Invalid("at least one feature is required".into()));
        }
        if labels.len() != n_rows {
            return Err(DataError::Invalid(format!(
                "{} ids but {} labels",
                n_rows,
                labels.len()
            )));
        }
        if features.len() != n_rows * n_features {
            return Err(DataError::Invalid(format!(
                "feature buffer holds {} values, expected {} x {}",
                features.len(),
                n_rows,
                n_features
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(DataError::Label {
                row: i + 1,
                id: ids[i].clone(),
                value: labels[i].to_string(),
            });
        }
        if let Some(k) = features.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite {
                row: k / n_features + 1,
                id: ids[k / n_features].clone(),
                column: format!("f{}", k % n_features),
            });
        }
        Ok(LabeledDataset {
            ids,
            labels,
            features,
            n_features,
        })
    }

    pub fn from_rows(
        ids: Vec<String>,
        labels: Vec<u8>,
        rows: &[Vec<f64>],
    ) -> Result<Self, DataError> {
        let n_features = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n_features) {
            return Err(DataError::Ragged {
                row: i + 1,
                id: ids.get(i).cloned().unwrap_or_default(),
                expected: n_features,
                found: rows[i].len(),
            });
        }
        Self::new(ids, labels, rows.concat(), n_features)
    }

    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Row-major feature buffer.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        [self.labels.len() - pos, pos]
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DataError> {
        let ids = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Self::new(ids, labels, features, self.n_features)
    }
}
