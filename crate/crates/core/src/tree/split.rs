use std::ops::{Add, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TreeError;
use crate::data::BinnedMatrix;

/// First and second derivative of the loss with respect to the raw score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradPair {
    pub g: f64,
    pub h: f64,
}

impl GradPair {
    pub fn new(g: f64, h: f64) -> Self {
        GradPair { g, h }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GradSum {
    pub g: f64,
    pub h: f64,
}

impl GradSum {
    /// Sums `grads` over `rows` in the order given.
    pub fn over(rows: &[usize], grads: &[GradPair]) -> Self {
        rows.iter().fold(GradSum::default(), |acc, &i| GradSum {
            g: acc.g + grads[i].g,
            h: acc.h + grads[i].h,
        })
    }
}

impl Add for GradSum {
    type Output = GradSum;
    fn add(self, o: GradSum) -> GradSum {
        GradSum {
            g: self.g + o.g,
            h: self.h + o.h,
        }
    }
}

impl Sub for GradSum {
    type Output = GradSum;
    fn sub(self, o: GradSum) -> GradSum {
        GradSum {
            g: self.g - o.g,
            h: self.h - o.h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Penalty subtracted from every split's gain.
    pub gamma: f64,
    pub max_depth: usize,
    /// Leaf budget for leaf-wise growth.
    pub max_leaves: usize,
    pub min_child_weight: f64,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            lambda: 1.0,
            gamma: 0.0,
            max_depth: 6,
            max_leaves: 31,
            min_child_weight: 1e-3,
            min_samples_leaf: 1,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<(), TreeError> {
        let bad = |m: &str| Err(TreeError::InvalidParams(m.to_string()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and >= 0");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be finite and >= 0");
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return bad("min_child_weight must be finite and >= 0");
        }
        if self.max_leaves == 0 {
            return bad("max_leaves must be positive");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be positive");
        }
        if self.max_depth > 30 {
            return bad("max_depth above 30 is not supported");
        }
        Ok(())
    }
}

pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> Result<f64, TreeError> {
    let denom = h + lambda;
    if denom == 0.0 {
        return Err(TreeError::DegenerateHessian(denom));
    }
    Ok(-g / denom)
}

/// `G^2 / (H + lambda)`, taken as zero when the denominator vanishes.
#[inline]
pub(crate) fn score_term(s: GradSum, lambda: f64) -> f64 {
    let denom = s.h + lambda;
    if denom > 0.0 {
        s.g * s.g / denom
    } else {
        0.0
    }
}

/// Gain of splitting `parent` into `left` and `right`, gamma not yet subtracted.
#[inline]
pub(crate) fn raw_gain(left: GradSum, right: GradSum, parent: GradSum, lambda: f64) -> f64 {
    0.5 * (score_term(left, lambda) + score_term(right, lambda) - score_term(parent, lambda))
}

pub fn split_gain(left: GradSum, right: GradSum, lambda: f64, gamma: f64) -> f64 {
    raw_gain(left, right, left + right, lambda) - gamma
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    /// Threshold index: rows with bin <= `bin` go left.
    pub bin: usize,
    pub gain: f64,
    pub left: GradSum,
    pub right: GradSum,
    pub left_count: usize,
    pub right_count: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct HistBin {
    pub sum: GradSum,
    pub count: usize,
}

/// Per-bin gradient sums of `rows` for one feature column, accumulated in row order.
pub(crate) fn build_histogram(
    column: &[u16],
    n_bins: usize,
    rows: &[usize],
    grads: &[GradPair],
) -> Vec<HistBin> {
    let mut hist = vec![HistBin::default(); n_bins];
    for &i in rows {
        let b = &mut hist[column[i] as usize];
        b.sum.g += grads[i].g;
        b.sum.h += grads[i].h;
        b.count += 1;
    }
    hist
}

/// Running left-side sums at each threshold index `0..n_bins-1`.
pub(crate) fn prefix_sums(hist: &[HistBin]) -> impl Iterator<Item = (usize, GradSum, usize)> + '_ {
    let mut sum = GradSum::default();
    let mut count = 0;
    hist[..hist.len().saturating_sub(1)]
        .iter()
        .enumerate()
        .map(move |(k, b)| {
            sum = sum + b.sum;
            count += b.count;
            (k, sum, count)
        })
}

fn best_in_histogram(
    feature: usize,
    hist: &[HistBin],
    parent: GradSum,
    n_rows: usize,
    params: &TreeParams,
) -> Option<SplitCandidate> {
    let mut best: Option<SplitCandidate> = None;
    for (k, left, left_count) in prefix_sums(hist) {
        let right_count = n_rows - left_count;
        if left_count < params.min_samples_leaf || right_count < params.min_samples_leaf {
            continue;
        }
        let right = parent - left;
        if left.h < params.min_child_weight || right.h < params.min_child_weight {
            continue;
        }
        if left.h + params.lambda <= 0.0 || right.h + params.lambda <= 0.0 {
            continue;
        }
        let gain = raw_gain(left, right, parent, params.lambda) - params.gamma;
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(SplitCandidate {
                feature,
                bin: k,
                gain,
                left,
                right,
                left_count,
                right_count,
            });
        }
    }
    best
}

/// Best histogram split of the node holding `rows`, or `None` when no
/// candidate has positive gain. Ties go to the lowest feature, then the
/// lowest threshold index.
pub fn best_split_histogram(
    binned: &BinnedMatrix,
    rows: &[usize],
    grads: &[GradPair],
    params: &TreeParams,
) -> Option<SplitCandidate> {
    if rows.len() < 2 {
        return None;
    }
    let parent = GradSum::over(rows, grads);
    best_split_with_parent(binned, rows, grads, parent, params)
}

pub(crate) fn best_split_with_parent(
    binned: &BinnedMatrix,
    rows: &[usize],
    grads: &[GradPair],
    parent: GradSum,
    params: &TreeParams,
) -> Option<SplitCandidate> {
    if rows.len() < 2 {
        return None;
    }
    let bins = binned.bins();
    let per_feature: Vec<Option<SplitCandidate>> = (0..binned.n_features())
        .into_par_iter()
        .map(|j| {
            let n_bins = bins.n_bins(j);
            if n_bins < 2 {
                return None;
            }
            let hist = build_histogram(binned.column(j), n_bins, rows, grads);
            best_in_histogram(j, &hist, parent, rows.len(), params)
        })
        .collect();
    per_feature
        .into_iter()
        .flatten()
        .fold(None, |best: Option<SplitCandidate>, c| match best {
            Some(b) if b.gain >= c.gain => Some(b),
            _ => Some(c),
        })
        .filter(|c| c.gain > 0.0)
}
