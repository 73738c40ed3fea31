//! Replays the checked-in fuzz corpus through the same properties the fuzz
//! targets assert, so regressions surface under plain `cargo test`.

use std::path::{Path, PathBuf};

use featboost::boosting::{BoostParams, BoostedModel};
use featboost::data::{
    parse_feature_csv, parse_labels, parse_probabilities, write_feature_csv, write_probabilities,
    FeatureMapTensor,
};
use featboost::grid::GridSpec;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds for {target}");
    files
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect()
}

/// Runs `check` on every seed and returns how many were accepted.
fn replay(target: &str, check: impl Fn(&[u8]) -> bool) -> usize {
    seeds(target).iter().filter(|(_, b)| check(b)).count()
}

#[test]
fn feature_csv_seeds() {
    let accepted = replay("feature_csv", |data| match parse_feature_csv(data) {
        Ok(ds) => {
            let bytes = write_feature_csv(&ds).unwrap();
            assert_eq!(parse_feature_csv(&bytes).unwrap(), ds);
            true
        }
        Err(_) => false,
    });
    assert_eq!(accepted, 2);
}

#[test]
fn labels_csv_seeds() {
    let accepted = replay("labels_csv", |data| match parse_labels(data) {
        Ok((ids, labels)) => {
            assert_eq!(ids.len(), labels.len());
            true
        }
        Err(_) => false,
    });
    assert_eq!(accepted, 2);
}

#[test]
fn probability_csv_seeds() {
    let accepted = replay("probability_csv", |data| match parse_probabilities(data) {
        Ok((ids, probs)) => {
            let bytes = write_probabilities(&ids, &probs).unwrap();
            assert_eq!(parse_probabilities(&bytes).unwrap(), (ids, probs));
            true
        }
        Err(_) => false,
    });
    assert_eq!(accepted, 1);
}

#[test]
fn tensor_seeds() {
    let accepted = replay("tensor", |data| match FeatureMapTensor::decode(data) {
        Ok(t) => {
            assert_eq!(t.encode(), data);
            true
        }
        Err(_) => false,
    });
    assert_eq!(accepted, 2);
}

#[test]
fn model_json_seeds() {
    let accepted = replay("model_json", |data| {
        let Ok(text) = std::str::from_utf8(data) else { return false };
        match BoostedModel::from_json(text) {
            Ok(model) => {
                let out = model.to_json();
                assert_eq!(BoostedModel::from_json(&out).unwrap().to_json(), out);
                true
            }
            Err(_) => false,
        }
    });
    assert_eq!(accepted, 3);
}

#[test]
fn boost_config_seeds() {
    let accepted = replay("boost_config", |data| {
        let text = std::str::from_utf8(data).unwrap();
        BoostParams::from_toml_str(text).is_ok_and(|p| p.validate().is_ok())
    });
    assert_eq!(accepted, 2);
}

#[test]
fn grid_spec_seeds() {
    let accepted = replay("grid_spec", |data| {
        let text = std::str::from_utf8(data).unwrap();
        GridSpec::parse(text, Path::new("/nonexistent-fuzz-base"), "seed").is_ok()
    });
    assert_eq!(accepted, 1);
}
