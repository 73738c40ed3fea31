use serde::Serialize;

use super::{
    accuracy, auc, balanced_accuracy, confusion, f1, roc_curve, ConfusionCounts, MetricError,
    RocCurve,
};
use crate::ensemble::{decide_at, exact_sum};

/// Scores for one magnification. Metrics that are undefined on the given
/// counts (for example balanced accuracy with a missing class) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnificationReport {
    pub tag: String,
    pub accuracy: f64,
    pub balanced_accuracy: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub balanced_accuracy: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub magnifications: Vec<MagnificationReport>,
    pub average: MetricSummary,
}

pub fn report(
    cc: &ConfusionCounts,
    curve: Option<&RocCurve>,
    tag: &str,
) -> Result<MagnificationReport, MetricError> {
    Ok(MagnificationReport {
        tag: tag.to_string(),
        accuracy: accuracy(cc)?,
        balanced_accuracy: balanced_accuracy(cc).ok(),
        f1: f1(cc).ok(),
        auc: curve.map(auc),
        tp: cc.tp,
        tn: cc.tn,
        fp: cc.fp,
        fn_: cc.fn_,
    })
}

/// Thresholds `probs`, counts, and builds the ROC curve when both classes
/// are present.
pub fn evaluate(
    tag: &str,
    labels: &[u8],
    probs: &[f64],
    threshold: f64,
) -> Result<MagnificationReport, MetricError> {
    let cc = confusion(labels, &decide_at(probs, threshold))?;
    let curve = match roc_curve(labels, probs) {
        Ok(c) => Some(c),
        Err(MetricError::SingleClass) => None,
        Err(e) => return Err(e),
    };
    report(&cc, curve.as_ref(), tag)
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    exact_sum(values.iter().copied()) / values.len() as f64
}

fn mean_opt(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let values: Option<Vec<f64>> = values.collect();
    values.map(|v| mean(v.into_iter()))
}

/// Unweighted mean over magnifications.
pub fn average_of(reports: &[MagnificationReport]) -> Result<MetricSummary, MetricError> {
    if reports.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(MetricSummary {
        accuracy: mean(reports.iter().map(|r| r.accuracy)),
        balanced_accuracy: mean_opt(reports.iter().map(|r| r.balanced_accuracy)),
        f1: mean_opt(reports.iter().map(|r| r.f1)),
        auc: mean_opt(reports.iter().map(|r| r.auc)),
    })
}

impl EvaluationReport {
    pub fn new(magnifications: Vec<MagnificationReport>) -> Result<Self, MetricError> {
        let average = average_of(&magnifications)?;
        Ok(Self {
            magnifications,
            average,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Percent table with one column per magnification and a final
    /// `average` column.
    pub fn to_table(&self) -> String {
        let cell = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), render_percent);
        let mut out = String::from("metric");
        for m in &self.magnifications {
            out.push(',');
            out.push_str(&m.tag);
        }
        out.push_str(",average\n");
        type Pick = fn(&MagnificationReport) -> Option<f64>;
        let rows: [(&str, Pick, Option<f64>); 4] = [
            ("accuracy", |m| Some(m.accuracy), Some(self.average.accuracy)),
            ("balanced_accuracy", |m| m.balanced_accuracy, self.average.balanced_accuracy),
            ("f1", |m| m.f1, self.average.f1),
            ("auc", |m| m.auc, self.average.auc),
        ];
        for (name, pick, avg) in rows {
            out.push_str(name);
            for m in &self.magnifications {
                out.push(',');
                out.push_str(&cell(pick(m)));
            }
            out.push(',');
            out.push_str(&cell(avg));
            out.push('\n');
        }
        out
    }
}

/// Renders a ratio as a percentage with two decimals, rounding halves up.
///
/// The value is first snapped to 1e-9 of a percent so that binary noise
/// (0.964575 is stored as 0.96457499999999997) cannot flip a half.
pub fn render_percent(ratio: f64) -> String {
    let nano = (ratio * 1e11).round() as i128;
    let hundredths = (nano + 5_000_000).div_euclid(10_000_000);
    let sign = if hundredths < 0 { "-" } else { "" };
    let h = hundredths.abs();
    format!("{sign}{}.{:02}", h / 100, h % 100)
}
