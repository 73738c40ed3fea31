//! Soft voting: the combined P(malignant) is the unweighted mean of the
//! members' probabilities, and the decision is malignant iff it is >= 0.5.
//!
//! Means are taken over a correctly rounded sum, so reordering members never
//! changes a single bit of the output.

use thiserror::Error;

use crate::boosting::{BoostError, BoostedModel};
use crate::data::LabeledDataset;

pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("soft vote needs at least one member")]
    NoMembers,
    #[error("member {member} has {found} rows, expected {expected}")]
    LengthMismatch {
        member: usize,
        expected: usize,
        found: usize,
    },
    #[error("member {member} row {row}: {value} is not a probability")]
    NotProbability { member: usize, row: usize, value: f64 },
    #[error("member {name:?} has {found} features, expected {expected}")]
    FeatureMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Boost(#[from] BoostError),
}

/// Correctly rounded sum of finite values (Shewchuk's partials with the
/// half-way correction used by Python's `math.fsum`).
pub fn exact_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let mut n = partials.len();
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// Per-row mean of the members' probabilities.
pub fn soft_vote(members: &[Vec<f64>]) -> Result<Vec<f64>, EnsembleError> {
    let first = members.first().ok_or(EnsembleError::NoMembers)?;
    let rows = first.len();
    for (m, probs) in members.iter().enumerate() {
        if probs.len() != rows {
            return Err(EnsembleError::LengthMismatch {
                member: m,
                expected: rows,
                found: probs.len(),
            });
        }
        if let Some(row) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(EnsembleError::NotProbability {
                member: m,
                row,
                value: probs[row],
            });
        }
    }
    let k = members.len() as f64;
    Ok((0..rows)
        .map(|i| {
            let column = members.iter().map(|m| m[i]);
            let lo = column.clone().fold(f64::INFINITY, f64::min);
            let hi = column.clone().fold(f64::NEG_INFINITY, f64::max);
            (exact_sum(column) / k).clamp(lo, hi)
        })
        .collect())
}

/// 1 (malignant) iff `p >= 0.5`; an exact tie goes to malignant.
pub fn decide(probs: &[f64]) -> Vec<u8> {
    decide_at(probs, DECISION_THRESHOLD)
}

pub fn decide_at(probs: &[f64], threshold: f64) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p >= threshold)).collect()
}

/// Named boosted models combined by soft voting.
#[derive(Debug, Clone)]
pub struct EnsembleModel {
    members: Vec<(String, BoostedModel)>,
}

impl EnsembleModel {
    pub fn new(members: Vec<(String, BoostedModel)>) -> Result<Self, EnsembleError> {
        let width = members.first().ok_or(EnsembleError::NoMembers)?.1.n_features();
        if let Some((name, m)) = members.iter().find(|(_, m)| m.n_features() != width) {
            return Err(EnsembleError::FeatureMismatch {
                name: name.clone(),
                expected: width,
                found: m.n_features(),
            });
        }
        Ok(EnsembleModel { members })
    }

    pub fn members(&self) -> &[(String, BoostedModel)] {
        &self.members
    }

    pub fn n_features(&self) -> usize {
        self.members[0].1.n_features()
    }

    pub fn member_probabilities(&self, ds: &LabeledDataset) -> Result<Vec<Vec<f64>>, EnsembleError> {
        self.members
            .iter()
            .map(|(_, m)| m.predict_proba(ds).map_err(EnsembleError::from))
            .collect()
    }

    pub fn predict_proba(&self, ds: &LabeledDataset) -> Result<Vec<f64>, EnsembleError> {
        soft_vote(&self.member_probabilities(ds)?)
    }
}
