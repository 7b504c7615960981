use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tmi_core::ingest::FeatureFormat;

/// Rank pre-trained models for a target task by the entropy of their
/// class-conditional embeddings, alongside common baselines.
#[derive(Debug, Parser)]
#[command(name = "tmi", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one feature matrix with one method.
    Score(ScoreArgs),
    /// Score every model in a manifest and compare against accuracies.
    Rank(RankArgs),
    /// Write a seeded Gaussian-blob dataset.
    Synth(SynthArgs),
    /// TMI over a list of neighbor counts.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_name = "PATH")]
    pub features: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub labels: PathBuf,
    /// tmi, icv_contrast, icv_center, icv_snca, icv_ms, nce, leep, logme,
    /// hscore or transrate.
    #[arg(long, value_name = "NAME")]
    pub method: String,
    /// Source-model class probabilities (required by nce and leep).
    #[arg(long, value_name = "PATH")]
    pub source_preds: Option<PathBuf>,
    /// Neighbor count for tmi.
    #[arg(long)]
    pub k: Option<usize>,
    /// Z-score feature dimensions before scoring.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long, default_value = "csv", value_name = "csv|binary")]
    pub format: FeatureFormat,
    /// Method hyperparameter override, e.g. `logme_tol=1e-8`.
    #[arg(long, value_name = "KEY=VAL", num_args = 1..)]
    pub config: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Run manifest (JSON).
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub num_classes: usize,
    /// One count for all classes, or one per class.
    #[arg(long, value_delimiter = ',', required = true)]
    pub samples_per_class: Vec<usize>,
    #[arg(long)]
    pub dim: usize,
    /// Class means as `;`-separated rows of `,`-separated values. A row with
    /// one value is repeated across all dimensions.
    #[arg(long, conflicts_with = "separation", allow_hyphen_values = true)]
    pub means: Option<String>,
    /// Without --means, class c is centered at c * SEPARATION on every axis.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub separation: f64,
    /// Isotropic standard deviation, once for all classes or per class.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1",
        allow_negative_numbers = true
    )]
    pub spreads: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "csv", value_name = "csv|binary")]
    pub format: FeatureFormat,
    /// Writes PREFIX_features.{csv,bin} and PREFIX_labels.csv.
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_name = "PATH")]
    pub features: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub labels: PathBuf,
    /// Comma-separated neighbor counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ks: Vec<usize>,
    #[arg(long, default_value = "csv", value_name = "csv|binary")]
    pub format: FeatureFormat,
}
