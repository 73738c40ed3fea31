//! Gradient-based one-side sampling.

use super::BoostError;
use crate::rng::SeededRng;
use crate::tree::GradPair;

const COUNT_EPS: f64 = 1e-9;

/// Rows kept for one boosting round, ascending, with the factor applied to
/// each row's gradient and hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct GossSample {
    pub indices: Vec<usize>,
    pub multipliers: Vec<f64>,
}

impl GossSample {
    /// Full-length gradients with the multipliers applied; rows left out keep
    /// their original values but are never read by the tree grower.
    pub fn reweight(&self, grads: &[GradPair]) -> Vec<GradPair> {
        let mut out = grads.to_vec();
        for (&i, &m) in self.indices.iter().zip(&self.multipliers) {
            out[i] = GradPair::new(grads[i].g * m, grads[i].h * m);
        }
        out
    }
}

/// Keeps the `ceil(a n)` rows with the largest `|g|` at weight 1 and a uniform
/// sample of `ceil(b n)` of the remaining rows at weight `(1 - a) / b`.
/// Equal `|g|` are ordered by row index.
pub fn goss_sample(grads: &[GradPair], a: f64, b: f64, seed: u64) -> Result<GossSample, BoostError> {
    if !(a > 0.0 && a <= 1.0) || !(0.0..=1.0).contains(&b) || a + b > 1.0 + COUNT_EPS {
        return Err(BoostError::InvalidParams(format!(
            "goss fractions need 0 < a <= 1, 0 <= b, a + b <= 1 (got a={a}, b={b})"
        )));
    }
    let n = grads.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| grads[j].g.abs().total_cmp(&grads[i].g.abs()).then(i.cmp(&j)));
    let n_top = ((a * n as f64 - COUNT_EPS).ceil() as usize).min(n);
    let (top, rest) = order.split_at_mut(n_top);
    rest.sort_unstable();
    let n_rand = ((b * n as f64 - COUNT_EPS).ceil().max(0.0) as usize).min(rest.len());
    SeededRng::new(seed).partial_shuffle(rest, n_rand);

    let weight = if b > 0.0 { (1.0 - a) / b } else { 1.0 };
    let mut picked: Vec<(usize, f64)> = top
        .iter()
        .map(|&i| (i, 1.0))
        .chain(rest[..n_rand].iter().map(|&i| (i, weight)))
        .collect();
    picked.sort_unstable_by_key(|p| p.0);
    Ok(GossSample {
        indices: picked.iter().map(|p| p.0).collect(),
        multipliers: picked.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grads(gs: &[f64]) -> Vec<GradPair> {
        gs.iter().map(|&g| GradPair::new(g, 0.25)).collect()
    }

    #[test]
    fn full_keep() {
        let g = grads(&[0.1, -0.4, 0.3]);
        let s = goss_sample(&g, 1.0, 0.0, 7).unwrap();
        assert_eq!(s.indices, [0, 1, 2]);
        assert_eq!(s.multipliers, [1.0; 3]);
    }

    #[test]
    fn ten_rows_two_top_three_sampled() {
        let g = grads(&[0.1, -0.9, 0.2, 0.3, 0.8, -0.1, 0.05, 0.4, -0.2, 0.15]);
        let s = goss_sample(&g, 0.2, 0.3, 11).unwrap();
        assert_eq!(s.indices.len(), 5);
        let top: Vec<usize> = s
            .indices
            .iter()
            .zip(&s.multipliers)
            .filter(|(_, &m)| m == 1.0)
            .map(|(&i, _)| i)
            .collect();
        assert_eq!(top, [1, 4]);
        for (&i, &m) in s.indices.iter().zip(&s.multipliers) {
            if i != 1 && i != 4 {
                assert!((m - 0.8 / 0.3).abs() < 1e-15);
                assert!((m - 2.667).abs() < 1e-3);
            }
        }
        assert_eq!(s, goss_sample(&g, 0.2, 0.3, 11).unwrap());
    }

    #[test]
    fn reweighted_gradient_sum_is_unbiased() {
        let g: Vec<GradPair> = (0..40)
            .map(|i| GradPair::new(((i * 7919) % 97) as f64 / 97.0 - 0.3, 0.2))
            .collect();
        let full: f64 = g.iter().map(|p| p.g).sum();
        let trials = 10_000;
        let mut mean = 0.0;
        for seed in 0..trials {
            let s = goss_sample(&g, 0.2, 0.1, seed).unwrap();
            let sum: f64 = s
                .indices
                .iter()
                .zip(&s.multipliers)
                .map(|(&i, &m)| g[i].g * m)
                .sum();
            mean += sum / trials as f64;
        }
        assert!((mean - full).abs() / full.abs() < 0.02, "mean {mean} vs {full}");
    }

    #[test]
    fn rejects_bad_fractions() {
        let g = grads(&[0.1]);
        assert!(goss_sample(&g, 0.0, 0.1, 0).is_err());
        assert!(goss_sample(&g, 0.8, 0.5, 0).is_err());
    }
}
