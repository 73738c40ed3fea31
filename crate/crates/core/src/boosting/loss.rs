use super::BoostError;
use crate::tree::GradPair;

pub fn sigmoid(f: f64) -> f64 {
    if f >= 0.0 {
        1.0 / (1.0 + (-f).exp())
    } else {
        let e = f.exp();
        e / (1.0 + e)
    }
}

/// `g = p - y`, `h = p (1 - p)` with `p = sigmoid(f)`. Both tails are
/// evaluated without cancellation, so `y = 1, f = 35` gives `g ≈ -6.3e-16`.
pub fn logistic_grad_hess(y: u8, f: f64) -> GradPair {
    let p = sigmoid(f);
    let q = sigmoid(-f);
    let g = if y == 1 { -q } else { p };
    GradPair::new(g, p * q)
}

/// `-y ln p - (1-y) ln(1-p)` written as `softplus(f) - y f`.
pub fn logloss(y: u8, f: f64) -> f64 {
    let softplus = f.max(0.0) + (-f.abs()).exp().ln_1p();
    softplus - f64::from(y) * f
}

pub fn mean_logloss(labels: &[u8], raw: &[f64]) -> f64 {
    let total: f64 = labels.iter().zip(raw).map(|(&y, &f)| logloss(y, f)).sum();
    total / labels.len() as f64
}

/// `ln(P / N)`, the log-odds of the positive class.
pub fn initial_score(labels: &[u8]) -> Result<f64, BoostError> {
    let positives = labels.iter().filter(|&&y| y == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(BoostError::SingleClass {
            positives,
            negatives,
        });
    }
    Ok((positives as f64 / negatives as f64).ln())
}
