//! `BoostedModel` and its JSON model file.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "flavor": "oblivious",
//!   "base_score": 0.78,
//!   "learning_rate": 0.1,
//!   "n_features": 2,
//!   "trees": [
//!     {
//!       "nodes": [{"id": 0, "feature": 1, "threshold": 0.25, "left": 1, "right": 2}],
//!       "leaves": [{"id": 1, "weight": -0.4}, {"id": 2, "weight": 0.3}],
//!       "level_splits": [{"feature": 1, "threshold": 0.25}]
//!     }
//!   ],
//!   "metadata": {...}
//! }
//! ```
//!
//! Node and leaf ids share one namespace `0..N` with the root at 0. Floats are
//! written in shortest round-trip form and parsed with correct rounding, so a
//! saved model predicts bit-identically after loading.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::BoostParams;
use super::loss::sigmoid;
use super::BoostError;
use crate::data::LabeledDataset;
use crate::fsutil::write_atomic;
use crate::tree::{Flavor, LevelSplit, Node, Tree};

pub const FORMAT_VERSION: u64 = 1;

/// Smallest distance kept between a probability and 0 or 1.
const PROB_FLOOR: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingMetadata {
    pub params: BoostParams,
    /// Mean training logloss at the base score, before any tree.
    pub initial_logloss: f64,
    /// Mean training logloss after each tree.
    pub train_logloss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    pub(crate) base_score: f64,
    pub(crate) learning_rate: f64,
    pub(crate) flavor: Flavor,
    pub(crate) n_features: usize,
    pub(crate) trees: Vec<Tree>,
    pub(crate) metadata: TrainingMetadata,
}

impl BoostedModel {
    pub fn new(
        base_score: f64,
        learning_rate: f64,
        flavor: Flavor,
        n_features: usize,
        trees: Vec<Tree>,
    ) -> Result<Self, BoostError> {
        let model = BoostedModel {
            base_score,
            learning_rate,
            flavor,
            n_features,
            trees,
            metadata: TrainingMetadata::default(),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), BoostError> {
        let bad = |m: String| Err(BoostError::Malformed(m));
        if !self.base_score.is_finite() {
            return bad("base_score must be finite".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!("learning_rate {} outside (0,1]", self.learning_rate));
        }
        if self.n_features == 0 {
            return bad("n_features must be positive".into());
        }
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.flavor() != self.flavor || tree.n_features() != self.n_features {
                return bad(format!("tree {t} does not match the model's flavor or width"));
            }
        }
        Ok(())
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn metadata(&self) -> &TrainingMetadata {
        &self.metadata
    }

    /// `f0 + lr * w_1 + lr * w_2 + ...`, accumulated tree by tree in that order.
    /// Training updates its running scores the same way.
    pub fn predict_raw_row(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_score, |s, t| s + self.learning_rate * t.predict_row(row))
    }

    fn check_width(&self, found: usize) -> Result<(), BoostError> {
        if found != self.n_features {
            return Err(BoostError::DimensionMismatch {
                expected: self.n_features,
                found,
            });
        }
        Ok(())
    }

    /// Raw scores for a row-major matrix with `n_features` columns.
    pub fn predict_raw_matrix(&self, features: &[f64], n_features: usize) -> Result<Vec<f64>, BoostError> {
        self.check_width(n_features)?;
        if !features.len().is_multiple_of(n_features) {
            return Err(BoostError::DimensionMismatch {
                expected: n_features,
                found: features.len() % n_features,
            });
        }
        Ok(features
            .par_chunks(n_features)
            .map(|row| self.predict_raw_row(row))
            .collect())
    }

    pub fn predict_raw(&self, ds: &LabeledDataset) -> Result<Vec<f64>, BoostError> {
        self.predict_raw_matrix(ds.features(), ds.n_features())
    }

    pub fn predict_proba_matrix(&self, features: &[f64], n_features: usize) -> Result<Vec<f64>, BoostError> {
        Ok(self
            .predict_raw_matrix(features, n_features)?
            .into_iter()
            .map(probability)
            .collect())
    }

    /// P(malignant) per row, strictly inside (0, 1).
    pub fn predict_proba(&self, ds: &LabeledDataset) -> Result<Vec<f64>, BoostError> {
        self.predict_proba_matrix(ds.features(), ds.n_features())
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            format_version: FORMAT_VERSION,
            flavor: self.flavor,
            base_score: self.base_score,
            learning_rate: self.learning_rate,
            n_features: self.n_features,
            trees: self.trees.iter().map(TreeDoc::from_tree).collect(),
            metadata: Some(self.metadata.clone()),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("model documents always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, BoostError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| BoostError::Malformed(e.to_string()))?;
        match value.get("format_version").map(serde_json::Value::as_u64) {
            Some(Some(FORMAT_VERSION)) => {}
            Some(Some(v)) => return Err(BoostError::Version(v)),
            Some(None) => return Err(BoostError::Malformed("format_version must be an integer".into())),
            None => return Err(BoostError::Malformed("missing format_version".into())),
        }
        let doc: ModelDoc =
            serde_json::from_value(value).map_err(|e| BoostError::Malformed(e.to_string()))?;
        let trees = doc
            .trees
            .into_iter()
            .enumerate()
            .map(|(t, td)| {
                td.into_tree(doc.flavor, doc.n_features)
                    .map_err(|e| BoostError::Malformed(format!("tree {t}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = BoostedModel::new(
            doc.base_score,
            doc.learning_rate,
            doc.flavor,
            doc.n_features,
            trees,
        )?;
        model.metadata = doc.metadata.unwrap_or_default();
        Ok(model)
    }
}

pub(crate) fn probability(raw: f64) -> f64 {
    sigmoid(raw).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

pub fn save_model(model: &BoostedModel, path: &Path) -> Result<(), BoostError> {
    write_atomic(path, model.to_json().as_bytes()).map_err(|source| BoostError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<BoostedModel, BoostError> {
    let text = std::fs::read_to_string(path).map_err(|source| BoostError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    BoostedModel::from_json(&text)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    format_version: u64,
    flavor: Flavor,
    base_score: f64,
    learning_rate: f64,
    n_features: usize,
    trees: Vec<TreeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<TrainingMetadata>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: usize,
    feature: usize,
    threshold: f64,
    left: usize,
    right: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafDoc {
    id: usize,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    nodes: Vec<NodeDoc>,
    leaves: Vec<LeafDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    level_splits: Option<Vec<LevelSplit>>,
}

impl TreeDoc {
    fn from_tree(tree: &Tree) -> Self {
        let mut nodes = Vec::new();
        let mut leaves = Vec::new();
        for (id, node) in tree.nodes().iter().enumerate() {
            match *node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => nodes.push(NodeDoc {
                    id,
                    feature,
                    threshold,
                    left,
                    right,
                }),
                Node::Leaf { weight } => leaves.push(LeafDoc { id, weight }),
            }
        }
        TreeDoc {
            nodes,
            leaves,
            level_splits: (tree.flavor() == Flavor::Oblivious).then(|| tree.level_splits().to_vec()),
        }
    }

    fn into_tree(self, flavor: Flavor, n_features: usize) -> Result<Tree, BoostError> {
        let total = self.nodes.len() + self.leaves.len();
        let mut arena: Vec<Option<Node>> = vec![None; total];
        let mut place = |id: usize, node: Node| {
            match arena.get_mut(id) {
                Some(slot @ None) => *slot = Some(node),
                Some(Some(_)) => return Err(BoostError::Malformed(format!("duplicate id {id}"))),
                None => return Err(BoostError::Malformed(format!("id {id} out of range 0..{total}"))),
            }
            Ok(())
        };
        for n in self.nodes {
            place(
                n.id,
                Node::Split {
                    feature: n.feature,
                    threshold: n.threshold,
                    left: n.left,
                    right: n.right,
                },
            )?;
        }
        for l in self.leaves {
            place(l.id, Node::Leaf { weight: l.weight })?;
        }
        // every slot is filled: `total` distinct ids in `0..total`
        let nodes = arena.into_iter().map(Option::unwrap).collect();
        if flavor != Flavor::Oblivious && self.level_splits.is_some() {
            return Err(BoostError::Malformed(
                "level_splits are only valid for oblivious trees".into(),
            ));
        }
        Ok(Tree::from_parts(
            flavor,
            n_features,
            nodes,
            self.level_splits.unwrap_or_default(),
        )?)
    }
}
