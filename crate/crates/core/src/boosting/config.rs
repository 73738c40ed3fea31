use serde::{Deserialize, Serialize};

use super::BoostError;
use crate::data::DEFAULT_MAX_BINS;
use crate::tree::{Flavor, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GossParams {
    /// Fraction of rows kept by largest |gradient|.
    pub a: f64,
    /// Fraction of rows sampled from the remainder.
    pub b: f64,
}

impl Default for GossParams {
    fn default() -> Self {
        GossParams { a: 0.2, b: 0.1 }
    }
}

/// Training configuration. Deserializes from TOML with every field optional:
///
/// ```toml
/// n_trees = 100
/// learning_rate = 0.1
/// seed = 0
/// max_bins = 256
///
/// [tree]
/// lambda = 1.0
/// gamma = 0.0
/// max_depth = 6
/// max_leaves = 31
/// min_child_weight = 0.001
/// min_samples_leaf = 1
///
/// [goss]   # leaf-wise only; omit to disable
/// a = 0.2
/// b = 0.1
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub flavor: Flavor,
    pub tree: TreeParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goss: Option<GossParams>,
    pub seed: u64,
    pub max_bins: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_trees: 100,
            learning_rate: 0.1,
            flavor: Flavor::LevelWise,
            tree: TreeParams::default(),
            goss: None,
            seed: 0,
            max_bins: DEFAULT_MAX_BINS,
        }
    }
}

impl BoostParams {
    pub fn with_flavor(flavor: Flavor) -> Self {
        BoostParams {
            flavor,
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, BoostError> {
        let params: BoostParams =
            toml::from_str(text).map_err(|e| BoostError::InvalidParams(e.to_string()))?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), BoostError> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(BoostError::InvalidParams(format!(
                "learning_rate must lie in (0,1], got {}",
                self.learning_rate
            )));
        }
        if let Some(g) = self.goss {
            if self.flavor != Flavor::LeafWise {
                return Err(BoostError::InvalidParams(
                    "goss is only valid for leaf-wise growth".into(),
                ));
            }
            if !(g.a > 0.0 && g.b > 0.0 && g.a + g.b <= 1.0) {
                return Err(BoostError::InvalidParams(format!(
                    "goss needs a > 0, b > 0, a + b <= 1 (got a={}, b={})",
                    g.a, g.b
                )));
            }
        }
        self.tree.validate()?;
        Ok(())
    }
}
