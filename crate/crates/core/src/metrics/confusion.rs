use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(truth: &[u8], predicted: &[u8]) -> Result<ConfusionCounts, MetricError> {
    if truth.len() != predicted.len() {
        return Err(MetricError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    let mut cc = ConfusionCounts::default();
    for (index, (&y, &p)) in truth.iter().zip(predicted).enumerate() {
        match (y, p) {
            (1, 1) => cc.tp += 1,
            (0, 0) => cc.tn += 1,
            (0, 1) => cc.fp += 1,
            (1, 0) => cc.fn_ += 1,
            _ => {
                return Err(MetricError::InvalidLabel {
                    index,
                    value: if y > 1 { y } else { p },
                })
            }
        }
    }
    Ok(cc)
}

/// (TP + TN) / (TP + TN + FP + FN)
pub fn accuracy(cc: &ConfusionCounts) -> Result<f64, MetricError> {
    if cc.total() == 0 {
        return Err(MetricError::Empty);
    }
    Ok((cc.tp + cc.tn) as f64 / cc.total() as f64)
}

/// Mean of the two per-class recalls.
pub fn balanced_accuracy(cc: &ConfusionCounts) -> Result<f64, MetricError> {
    if cc.tp + cc.fn_ == 0 {
        return Err(MetricError::AbsentClass("malignant"));
    }
    if cc.tn + cc.fp == 0 {
        return Err(MetricError::AbsentClass("benign"));
    }
    let tpr = cc.tp as f64 / (cc.tp + cc.fn_) as f64;
    let tnr = cc.tn as f64 / (cc.tn + cc.fp) as f64;
    Ok(0.5 * (tpr + tnr))
}

/// TP / (TP + (FP + FN) / 2), evaluated as 2TP / (2TP + FP + FN).
pub fn f1(cc: &ConfusionCounts) -> Result<f64, MetricError> {
    if cc.tp + cc.fp + cc.fn_ == 0 {
        return Err(MetricError::F1Undefined);
    }
    let two_tp = 2 * cc.tp;
    Ok(two_tp as f64 / (two_tp + cc.fp + cc.fn_) as f64)
}
