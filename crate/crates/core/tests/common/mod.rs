//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.
#![allow(dead_code)]

use featboost::data::LabeledDataset;
use featboost::tree::{GradPair, TreeParams};
use num::{BigInt, BigRational, ToPrimitive};

pub fn dataset(rows: &[Vec<f64>], labels: &[u8]) -> LabeledDataset {
    let ids = (0..rows.len()).map(|i| format!("r{i}")).collect();
    LabeledDataset::from_rows(ids, labels.to_vec(), rows).unwrap()
}

pub fn unlabeled(rows: &[Vec<f64>]) -> LabeledDataset {
    dataset(rows, &vec![0; rows.len()])
}

fn term(g: f64, h: f64, lambda: f64) -> f64 {
    if h + lambda > 0.0 {
        g * g / (h + lambda)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSplit {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Exact greedy scan: for every feature, sort rows by raw value and try a cut
/// between each pair of consecutive distinct values.
pub fn exact_greedy_split(
    ds: &LabeledDataset,
    rows: &[usize],
    grads: &[GradPair],
    params: &TreeParams,
) -> Option<ExactSplit> {
    if rows.len() < 2 {
        return None;
    }
    let gt: f64 = rows.iter().map(|&i| grads[i].g).sum();
    let ht: f64 = rows.iter().map(|&i| grads[i].h).sum();
    let mut best: Option<ExactSplit> = None;
    for f in 0..ds.n_features() {
        let mut vals: Vec<f64> = rows.iter().map(|&i| ds.value(i, f)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for w in vals.windows(2) {
            let cut = w[0];
            let left: Vec<usize> = rows.iter().copied().filter(|&i| ds.value(i, f) <= cut).collect();
            let nl = left.len();
            let nr = rows.len() - nl;
            let gl: f64 = left.iter().map(|&i| grads[i].g).sum();
            let hl: f64 = left.iter().map(|&i| grads[i].h).sum();
            let (gr, hr) = (gt - gl, ht - hl);
            if nl < params.min_samples_leaf || nr < params.min_samples_leaf {
                continue;
            }
            if hl < params.min_child_weight || hr < params.min_child_weight {
                continue;
            }
            if hl + params.lambda <= 0.0 || hr + params.lambda <= 0.0 {
                continue;
            }
            let gain = 0.5
                * (term(gl, hl, params.lambda) + term(gr, hr, params.lambda)
                    - term(gt, ht, params.lambda))
                - params.gamma;
            if best.is_none_or(|b| gain > b.gain) {
                best = Some(ExactSplit {
                    feature: f,
                    threshold: (w[0] + w[1]) / 2.0,
                    gain,
                });
            }
        }
    }
    best.filter(|b| b.gain > 0.0)
}

/// Raw (pre-gamma) gain of cutting `rows` at raw `threshold` on `feature`.
pub fn raw_cut_gain(
    ds: &LabeledDataset,
    rows: &[usize],
    grads: &[GradPair],
    feature: usize,
    threshold: f64,
    lambda: f64,
) -> f64 {
    let (mut gl, mut hl, mut gr, mut hr) = (0.0, 0.0, 0.0, 0.0);
    for &i in rows {
        if ds.value(i, feature) < threshold {
            gl += grads[i].g;
            hl += grads[i].h;
        } else {
            gr += grads[i].g;
            hr += grads[i].h;
        }
    }
    0.5 * (term(gl, hl, lambda) + term(gr, hr, lambda) - term(gl + gr, hl + hr, lambda))
}

/// Pairwise Mann–Whitney AUC with ties counted as one half.
pub fn mann_whitney_auc(labels: &[u8], scores: &[f64]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != 0 {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact-rational accuracy, balanced accuracy and F1 for `(tp, tn, fp, fn)`.
pub fn rational_metrics(tp: u64, tn: u64, fp: u64, fn_: u64) -> (f64, Option<f64>, Option<f64>) {
    let acc = ratio(tp + tn, tp + tn + fp + fn_);
    let bal = if tp + fn_ > 0 && tn + fp > 0 {
        let half = ratio(1, 2);
        Some(half * (ratio(tp, tp + fn_) + ratio(tn, tn + fp)))
    } else {
        None
    };
    let f1 = if tp + fp + fn_ > 0 {
        // TP / (TP + (FP + FN)/2)
        let denom = BigRational::from_integer(BigInt::from(tp)) + ratio(fp + fn_, 2);
        Some(BigRational::from_integer(BigInt::from(tp)) / denom)
    } else {
        None
    };
    (
        acc.to_f64().unwrap(),
        bal.map(|b| b.to_f64().unwrap()),
        f1.map(|f| f.to_f64().unwrap()),
    )
}

/// Two-class 2-D Gaussian blobs with unit variance and class means at
/// `(-s/2, -s/2)` and `(s/2, s/2)`, i.e. `s` standard deviations apart on each
/// axis. Classes alternate row by row.
pub fn gaussian_blobs(n: usize, separation: f64, seed: u64) -> LabeledDataset {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = (i % 2) as u8;
        let mu = if y == 1 { separation / 2.0 } else { -separation / 2.0 };
        rows.push(vec![mu + normal.sample(&mut rng), mu + normal.sample(&mut rng)]);
        labels.push(y);
    }
    dataset(&rows, &labels)
}

/// Direct `-y ln p - (1-y) ln(1-p)`, no reformulation.
pub fn naive_logloss(y: u8, f: f64) -> f64 {
    let p = 1.0 / (1.0 + (-f).exp());
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

pub fn accuracy_at_half(labels: &[u8], probs: &[f64]) -> f64 {
    let hits = labels
        .iter()
        .zip(probs)
        .filter(|(&y, &p)| (p >= 0.5) == (y == 1))
        .count();
    hits as f64 / labels.len() as f64
}
