use super::dataset::{DataError, LabeledDataset};
use crate::rng::SeededRng;

/// Absorbs representation error in products like `0.7 * 10` before flooring.
const COUNT_EPS: f64 = 1e-9;

/// Per-class seeded split: class `c` with `n_c` rows sends
/// `floor(train_frac * n_c)` of them to train and the rest to test.
///
/// Class 0's index list is shuffled first, then class 1's, from a single
/// SplitMix64 stream. Both outputs keep the original row order.
pub fn stratified_split(
    ds: &LabeledDataset,
    train_frac: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), DataError> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(DataError::TrainFraction(train_frac));
    }
    let mut rng = SeededRng::new(seed);
    let mut in_train = vec![false; ds.n_rows()];
    for class in 0..=1u8 {
        let mut idx: Vec<usize> = (0..ds.n_rows())
            .filter(|&i| ds.labels()[i] == class)
            .collect();
        if idx.is_empty() {
            return Err(DataError::EmptyClass(class));
        }
        rng.shuffle(&mut idx);
        let n_train = (train_frac * idx.len() as f64 + COUNT_EPS).floor() as usize;
        for &i in &idx[..n_train] {
            in_train[i] = true;
        }
    }
    let (train, test): (Vec<usize>, Vec<usize>) = (0..ds.n_rows()).partition(|&i| in_train[i]);
    let part = |rows: &[usize]| {
        if rows.is_empty() {
            Err(DataError::Invalid(format!(
                "train fraction {train_frac} leaves one side of the split empty"
            )))
        } else {
            ds.subset(rows)
        }
    };
    Ok((part(&train)?, part(&test)?))
}
