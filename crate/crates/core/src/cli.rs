//! `featboost` command line.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use crate::boosting::{load_model, save_model, train_gbdt, BoostParams};
use crate::data::{
    load_feature_matrix, load_labels, load_probabilities, read_tensor, save_feature_matrix,
    stratified_split, write_probabilities, write_tensor,
};
use crate::ensemble::EnsembleModel;
use crate::fsutil::write_atomic;
use crate::gradcam::{colorize, encode_png, gradcam, load_image, normalize, normalize_upsample, overlay};
use crate::grid::{run_grid, GridSpec};
use crate::metrics::{evaluate, roc_curve, EvaluationReport};
use crate::tree::Flavor;

#[derive(Debug, Parser)]
#[command(name = "featboost", version, about = "Gradient-boosted trees over deep-feature vectors")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Algo {
    Levelwise,
    Leafwise,
    Oblivious,
}

impl From<Algo> for Flavor {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Levelwise => Flavor::LevelWise,
            Algo::Leafwise => Flavor::LeafWise,
            Algo::Oblivious => Flavor::Oblivious,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stratified train/test split of a feature CSV.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.7)]
        train_frac: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
    },
    /// Train one boosted model.
    Train {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        train: PathBuf,
        /// TOML parameter file; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write P(malignant) per row; several models are soft-voted.
    Predict {
        #[arg(long, value_delimiter = ',', required = true)]
        model: Vec<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a probability file against labels.
    Eval {
        #[arg(long)]
        probs: PathBuf,
        /// `id,label` CSV or a feature CSV.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value = "all")]
        tag: String,
        #[arg(long)]
        out: PathBuf,
        /// Also write the ROC curve as `fpr,tpr,threshold`.
        #[arg(long)]
        roc: Option<PathBuf>,
    },
    /// Train and evaluate all seven classifier combinations.
    Grid {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_acc: PathBuf,
        #[arg(long)]
        out_f1: PathBuf,
    },
    /// Heatmap from activation and gradient tensors. A `.png` output is
    /// rendered (overlaid on `--image` if given); anything else is a tensor.
    Gradcam {
        #[arg(long)]
        activations: PathBuf,
        #[arg(long)]
        gradients: PathBuf,
        #[arg(long)]
        image: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn member_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

impl Cli {
    pub fn run(self) -> Result<()> {
        if let Some(n) = self.threads {
            if n == 0 {
                bail!("--threads must be at least 1");
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring worker threads")?;
        }
        match self.command {
            Command::Split {
                input,
                train_frac,
                seed,
                out_train,
                out_test,
            } => {
                let ds = load_feature_matrix(&input)?;
                let (train, test) = stratified_split(&ds, train_frac, seed)?;
                save_feature_matrix(&train, &out_train)?;
                save_feature_matrix(&test, &out_test)?;
                eprintln!("split {} rows: {} train, {} test", ds.n_rows(), train.n_rows(), test.n_rows());
            }
            Command::Train {
                algo,
                train,
                config,
                out,
            } => {
                let mut params = match &config {
                    Some(p) => {
                        let text = std::fs::read_to_string(p)
                            .with_context(|| format!("reading {}", p.display()))?;
                        BoostParams::from_toml_str(&text).with_context(|| p.display().to_string())?
                    }
                    None => BoostParams::default(),
                };
                params.flavor = algo.into();
                let ds = load_feature_matrix(&train)?;
                let model = train_gbdt(&ds, &params)?;
                save_model(&model, &out)?;
                eprintln!(
                    "trained {} trees, train logloss {:.6}",
                    model.trees().len(),
                    model.metadata().train_logloss.last().copied().unwrap_or(model.metadata().initial_logloss)
                );
            }
            Command::Predict { model, input, out } => {
                let members = model
                    .iter()
                    .map(|p| Ok((member_name(p), load_model(p)?)))
                    .collect::<Result<Vec<_>>>()?;
                let ensemble = EnsembleModel::new(members)?;
                let ds = load_feature_matrix(&input)?;
                let probs = ensemble.predict_proba(&ds)?;
                write(&out, &write_probabilities(ds.ids(), &probs)?)?;
            }
            Command::Eval {
                probs,
                labels,
                threshold,
                tag,
                out,
                roc,
            } => {
                let (pid, p) = load_probabilities(&probs)?;
                let (lid, y) = load_labels(&labels)?;
                let p = join_by_id(&lid, &pid, &p)
                    .with_context(|| format!("joining {} with {}", probs.display(), labels.display()))?;
                let rec = evaluate(&tag, &y, &p, threshold)?;
                write(&out, EvaluationReport::new(vec![rec])?.to_json().as_bytes())?;
                if let Some(path) = roc {
                    write(&path, roc_curve(&y, &p)?.to_csv().as_bytes())?;
                }
            }
            Command::Grid {
                spec,
                out_acc,
                out_f1,
            } => {
                let spec = GridSpec::load(&spec)?;
                let grid = run_grid(&spec)?;
                write(&out_acc, grid.accuracy_csv().as_bytes())?;
                write(&out_f1, grid.f1_csv().as_bytes())?;
            }
            Command::Gradcam {
                activations,
                gradients,
                image,
                out,
            } => {
                let acts = read_tensor(&activations).with_context(|| activations.display().to_string())?;
                let grads = read_tensor(&gradients).with_context(|| gradients.display().to_string())?;
                let raw = gradcam(&acts, &grads)?;
                let image = image.as_deref().map(load_image).transpose()?;
                let heat = match &image {
                    Some(img) => normalize_upsample(&raw, img.height() as usize, img.width() as usize)?,
                    None => normalize(&raw),
                };
                let is_png = out
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("png"));
                if is_png {
                    let rendered = match &image {
                        Some(img) => overlay(&heat, img)?,
                        None => colorize(&heat),
                    };
                    write(&out, &encode_png(&rendered)?)?;
                } else {
                    write_tensor(&heat.to_tensor(), &out)?;
                }
            }
        }
        Ok(())
    }
}

/// Reorders `probs` (keyed by `prob_ids`) to follow `label_ids`.
fn join_by_id(label_ids: &[String], prob_ids: &[String], probs: &[f64]) -> Result<Vec<f64>> {
    let mut by_id = HashMap::with_capacity(prob_ids.len());
    for (id, &p) in prob_ids.iter().zip(probs) {
        if by_id.insert(id.as_str(), p).is_some() {
            bail!("duplicate id {id:?} in probabilities");
        }
    }
    if by_id.len() != label_ids.len() {
        bail!("{} probabilities for {} labelled rows", by_id.len(), label_ids.len());
    }
    label_ids
        .iter()
        .map(|id| by_id.get(id.as_str()).copied().with_context(|| format!("no probability for id {id:?}")))
        .collect()
}
