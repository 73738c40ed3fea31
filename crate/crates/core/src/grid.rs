//! Experiment grid: three single models per magnification, seven
//! classifier combinations evaluated from their cached test probabilities.
//!
//! Spec file (TOML, paths relative to the spec file):
//!
//! ```toml
//! config = "params.toml"   # optional BoostParams file
//! seed = 7                 # optional, overrides the config seed
//!
//! [[magnification]]
//! tag = "200x"
//! train = "200x_train.csv"
//! test = "200x_test.csv"
//! ```

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::boosting::{train_gbdt, BoostError, BoostParams};
use crate::data::{load_feature_matrix, DataError};
use crate::ensemble::{soft_vote, EnsembleError, DECISION_THRESHOLD};
use crate::metrics::{evaluate, render_percent, MagnificationReport, MetricError};
use crate::tree::Flavor;

/// Row labels and members, in table order. X = level-wise, L = leaf-wise,
/// C = oblivious.
pub const COMBINATIONS: [(&str, &[Flavor]); 7] = [
    ("X", &[Flavor::LevelWise]),
    ("L", &[Flavor::LeafWise]),
    ("C", &[Flavor::Oblivious]),
    ("X&L", &[Flavor::LevelWise, Flavor::LeafWise]),
    ("X&C", &[Flavor::LevelWise, Flavor::Oblivious]),
    ("L&C", &[Flavor::LeafWise, Flavor::Oblivious]),
    ("X&L&C", &[Flavor::LevelWise, Flavor::LeafWise, Flavor::Oblivious]),
];

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid spec lists no magnifications")]
    EmptySpec,
    #[error("grid spec {path}: {message}")]
    Spec { path: String, message: String },
    #[error("duplicate magnification tag {0:?}")]
    DuplicateTag(String),
    #[error("{tag}: {source}")]
    Data {
        tag: String,
        #[source]
        source: DataError,
    },
    #[error("{tag} {flavor}: {source}")]
    Train {
        tag: String,
        flavor: &'static str,
        #[source]
        source: BoostError,
    },
    #[error("{tag}: {source}")]
    Ensemble {
        tag: String,
        #[source]
        source: EnsembleError,
    },
    #[error("{tag}: {source}")]
    Metric {
        tag: String,
        #[source]
        source: MetricError,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    config: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    magnification: Vec<MagnificationFile>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct MagnificationFile {
    tag: String,
    train: PathBuf,
    test: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Magnification {
    pub tag: String,
    pub train: PathBuf,
    pub test: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub params: BoostParams,
    pub magnifications: Vec<Magnification>,
}

impl GridSpec {
    /// Parses spec text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path, origin: &str) -> Result<Self, GridError> {
        let spec_err = |message: String| GridError::Spec {
            path: origin.to_string(),
            message,
        };
        let file: SpecFile = toml::from_str(text).map_err(|e| spec_err(e.to_string()))?;
        let mut params = match &file.config {
            Some(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| spec_err(format!("{}: {e}", path.display())))?;
                BoostParams::from_toml_str(&text)
                    .map_err(|e| spec_err(format!("{}: {e}", path.display())))?
            }
            None => BoostParams::default(),
        };
        if let Some(seed) = file.seed {
            params.seed = seed;
        }
        if file.magnification.is_empty() {
            return Err(GridError::EmptySpec);
        }
        let mut magnifications: Vec<Magnification> = Vec::new();
        for m in file.magnification {
            if magnifications.iter().any(|x| x.tag == m.tag) {
                return Err(GridError::DuplicateTag(m.tag));
            }
            magnifications.push(Magnification {
                tag: m.tag,
                train: base.join(m.train),
                test: base.join(m.test),
            });
        }
        Ok(GridSpec {
            params,
            magnifications,
        })
    }

    pub fn load(path: &Path) -> Result<Self, GridError> {
        let text = std::fs::read_to_string(path).map_err(|e| GridError::Spec {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }
}

/// Parameters for one flavor; GOSS settings only apply to leaf-wise growth.
pub fn params_for(base: &BoostParams, flavor: Flavor) -> BoostParams {
    let mut p = base.clone();
    p.flavor = flavor;
    if flavor != Flavor::LeafWise {
        p.goss = None;
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnificationResult {
    pub tag: String,
    pub labels: Vec<u8>,
    /// Test probabilities of the three single models, in [`Flavor::ALL`] order.
    pub single: [Vec<f64>; 3],
    /// One report per entry of [`COMBINATIONS`].
    pub reports: Vec<MagnificationReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    pub magnifications: Vec<MagnificationResult>,
}

fn flavor_slot(f: Flavor) -> usize {
    Flavor::ALL.iter().position(|&x| x == f).expect("known flavor")
}

fn run_magnification(m: &Magnification, base: &BoostParams) -> Result<MagnificationResult, GridError> {
    let data_err = |source| GridError::Data {
        tag: m.tag.clone(),
        source,
    };
    let train = load_feature_matrix(&m.train).map_err(data_err)?;
    let test = load_feature_matrix(&m.test).map_err(data_err)?;
    let mut single: [Vec<f64>; 3] = Default::default();
    for (slot, flavor) in Flavor::ALL.into_iter().enumerate() {
        let train_err = |source| GridError::Train {
            tag: m.tag.clone(),
            flavor: flavor.as_str(),
            source,
        };
        let model = train_gbdt(&train, &params_for(base, flavor)).map_err(train_err)?;
        single[slot] = model.predict_proba(&test).map_err(train_err)?;
    }
    let labels = test.labels().to_vec();
    let reports = COMBINATIONS
        .iter()
        .map(|(name, members)| {
            let probs: Vec<Vec<f64>> = members.iter().map(|&f| single[flavor_slot(f)].clone()).collect();
            let voted = soft_vote(&probs).map_err(|source| GridError::Ensemble {
                tag: m.tag.clone(),
                source,
            })?;
            evaluate(name, &labels, &voted, DECISION_THRESHOLD).map_err(|source| GridError::Metric {
                tag: m.tag.clone(),
                source,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(MagnificationResult {
        tag: m.tag.clone(),
        labels,
        single,
        reports,
    })
}

/// Magnifications run in parallel; results keep spec order.
pub fn run_grid(spec: &GridSpec) -> Result<GridReport, GridError> {
    if spec.magnifications.is_empty() {
        return Err(GridError::EmptySpec);
    }
    let magnifications = spec
        .magnifications
        .par_iter()
        .map(|m| run_magnification(m, &spec.params))
        .collect::<Result<_, _>>()?;
    Ok(GridReport { magnifications })
}

impl GridReport {
    fn table(&self, pick: impl Fn(&MagnificationReport) -> Option<f64>) -> String {
        let mut out = String::from("classifier");
        for m in &self.magnifications {
            out.push(',');
            out.push_str(&m.tag);
        }
        out.push('\n');
        for (row, (name, _)) in COMBINATIONS.iter().enumerate() {
            out.push_str(name);
            for m in &self.magnifications {
                out.push(',');
                out.push_str(&pick(&m.reports[row]).map_or_else(|| "n/a".into(), render_percent));
            }
            out.push('\n');
        }
        out
    }

    /// Accuracy percentages: rows are combinations, columns magnifications.
    pub fn accuracy_csv(&self) -> String {
        self.table(|r| Some(r.accuracy))
    }

    pub fn f1_csv(&self) -> String {
        self.table(|r| r.f1)
    }
}
