//! Binary evaluation: confusion counts, accuracy, balanced accuracy, F1,
//! ROC curves with trapezoidal AUC, and per-magnification reports.

mod confusion;
mod report;
mod roc;

pub use confusion::{accuracy, balanced_accuracy, confusion, f1, ConfusionCounts};
pub use report::{
    average_of, evaluate, render_percent, report, EvaluationReport, MagnificationReport,
    MetricSummary,
};
pub use roc::{auc, roc_curve, RocCurve, RocPoint};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("label {value} at position {index} is not 0 or 1")]
    InvalidLabel { index: usize, value: u8 },
    #[error("no rows to evaluate")]
    Empty,
    #[error("the {0} class is absent from the evaluation set")]
    AbsentClass(&'static str),
    #[error("F1 is undefined when TP + FP + FN = 0")]
    F1Undefined,
    #[error("ROC needs both classes present")]
    SingleClass,
    #[error("score at position {0} is not finite")]
    NonFiniteScore(usize),
}
