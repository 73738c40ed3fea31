//! Quantile binning for histogram split finding.
//!
//! A value's bin is the number of thresholds strictly below it, so a value
//! equal to a threshold lands in the lower bin. Features with at most
//! `max_bins` distinct values get one threshold between each consecutive pair
//! of distinct values, which makes their binning lossless.

use std::sync::Arc;

use rayon::prelude::*;

use super::dataset::{DataError, LabeledDataset};

pub const DEFAULT_MAX_BINS: usize = 256;
const MAX_SUPPORTED_BINS: usize = u16::MAX as usize + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBins {
    thresholds: Vec<Vec<f64>>,
    max_bins: usize,
}

impl FeatureBins {
    pub fn max_bins(&self) -> usize {
        self.max_bins
    }

    pub fn n_features(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self, feature: usize) -> &[f64] {
        &self.thresholds[feature]
    }

    /// Number of populated bins for `feature` (threshold count + 1).
    pub fn n_bins(&self, feature: usize) -> usize {
        self.thresholds[feature].len() + 1
    }

    pub fn bin_of(&self, feature: usize, value: f64) -> u16 {
        self.thresholds[feature].partition_point(|&t| t < value) as u16
    }
}

/// Cut point between consecutive distinct values `a < b`. Always `a <= m < b`,
/// so `a` bins low and `b` bins high even when no float lies strictly between.
fn cut_between(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m > a && m < b {
        m
    } else {
        a
    }
}

fn feature_thresholds(mut values: Vec<f64>, max_bins: usize) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let mut distinct: Vec<f64> = Vec::new();
    let mut cum: Vec<usize> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if distinct.last() != Some(&v) {
            distinct.push(v);
            cum.push(0);
        }
        *cum.last_mut().unwrap() = i + 1;
    }
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| cut_between(w[0], w[1])).collect();
    }
    let mut out: Vec<f64> = Vec::with_capacity(max_bins - 1);
    let mut i = 0;
    for k in 1..max_bins {
        // first distinct value whose cumulative count reaches k/max_bins of n
        while cum[i] * max_bins < k * n {
            i += 1;
        }
        if i + 1 >= distinct.len() {
            break;
        }
        let t = cut_between(distinct[i], distinct[i + 1]);
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

pub fn compute_bins(ds: &LabeledDataset, max_bins: usize) -> Result<FeatureBins, DataError> {
    if !(2..=MAX_SUPPORTED_BINS).contains(&max_bins) {
        return Err(DataError::MaxBins(max_bins));
    }
    let thresholds = (0..ds.n_features())
        .into_par_iter()
        .map(|j| {
            let column = (0..ds.n_rows()).map(|i| ds.value(i, j)).collect();
            feature_thresholds(column, max_bins)
        })
        .collect();
    Ok(FeatureBins {
        thresholds,
        max_bins,
    })
}

/// Column-major matrix of bin indices.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    n_rows: usize,
    n_features: usize,
    columns: Vec<u16>,
    bins: Arc<FeatureBins>,
}

impl BinnedMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn bins(&self) -> &FeatureBins {
        &self.bins
    }

    pub fn column(&self, feature: usize) -> &[u16] {
        &self.columns[feature * self.n_rows..(feature + 1) * self.n_rows]
    }

    pub fn get(&self, row: usize, feature: usize) -> u16 {
        self.columns[feature * self.n_rows + row]
    }
}

pub fn bin_features(ds: &LabeledDataset, bins: &FeatureBins) -> Result<BinnedMatrix, DataError> {
    if ds.n_features() != bins.n_features() {
        return Err(DataError::DimensionMismatch {
            expected: bins.n_features(),
            found: ds.n_features(),
        });
    }
    let n_rows = ds.n_rows();
    let columns: Vec<u16> = (0..ds.n_features())
        .into_par_iter()
        .flat_map_iter(|j| (0..n_rows).map(move |i| bins.bin_of(j, ds.value(i, j))))
        .collect();
    Ok(BinnedMatrix {
        n_rows,
        n_features: ds.n_features(),
        columns,
        bins: Arc::new(bins.clone()),
    })
}
