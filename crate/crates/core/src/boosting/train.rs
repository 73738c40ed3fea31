use rayon::prelude::*;

use super::config::BoostParams;
use super::goss::goss_sample;
use super::loss::{initial_score, logistic_grad_hess, mean_logloss};
use super::model::{BoostedModel, TrainingMetadata};
use super::BoostError;
use crate::data::{bin_features, compute_bins, LabeledDataset};
use crate::rng::SeededRng;
use crate::tree::{grow_tree, GradPair};

/// Fits `params.n_trees` trees of the configured flavor by Newton boosting
/// on binary logloss.
///
/// Bins come from the training set alone. The first round always uses every
/// row; later rounds use GOSS when enabled. Running raw scores are updated by
/// routing raw feature values through each new tree, exactly as prediction
/// does.
pub fn train_gbdt(train: &LabeledDataset, params: &BoostParams) -> Result<BoostedModel, BoostError> {
    params.validate()?;
    let labels = train.labels();
    let base_score = initial_score(labels)?;
    let bins = compute_bins(train, params.max_bins)?;
    let binned = bin_features(train, &bins)?;
    let n = train.n_rows();
    let all_rows: Vec<usize> = (0..n).collect();

    let mut raw = vec![base_score; n];
    let initial_logloss = mean_logloss(labels, &raw);
    let mut train_logloss = Vec::with_capacity(params.n_trees);
    let mut trees = Vec::with_capacity(params.n_trees);

    for round in 0..params.n_trees {
        let grads: Vec<GradPair> = labels
            .par_iter()
            .zip(raw.par_iter())
            .map(|(&y, &f)| logistic_grad_hess(y, f))
            .collect();
        let tree = match params.goss {
            Some(g) if round > 0 => {
                let stream = SeededRng::with_stream(params.seed, round as u64).next_u64();
                let sample = goss_sample(&grads, g.a, g.b, stream)?;
                let weighted = sample.reweight(&grads);
                grow_tree(params.flavor, &binned, &weighted, &sample.indices, &params.tree)
            }
            _ => grow_tree(params.flavor, &binned, &grads, &all_rows, &params.tree),
        };
        let lr = params.learning_rate;
        raw.par_iter_mut().enumerate().for_each(|(i, s)| {
            *s += lr * tree.predict_row(train.row(i));
        });
        train_logloss.push(mean_logloss(labels, &raw));
        trees.push(tree);
    }

    let mut model = BoostedModel::new(
        base_score,
        params.learning_rate,
        params.flavor,
        train.n_features(),
        trees,
    )?;
    model.metadata = TrainingMetadata {
        params: params.clone(),
        initial_logloss,
        train_logloss,
    };
    Ok(model)
}
