//! Ranking pre-trained feature extractors for a target task without
//! fine-tuning them.
//!
//! Given the target-set embeddings each candidate model produces, the main
//! score is the label-conditional differential entropy of the embeddings,
//! `H(X | Y) = Σ_c (n_c/n) H(X_c)`, estimated with a k-nearest-neighbor
//! estimator. Higher intra-class spread under a fixed extractor predicts
//! better transfer, so the model with the largest score is selected.
//!
//! | module | contents |
//! |--------|----------|
//! | [`ingest`] | feature/label/prediction/accuracy types, file formats, synthetic blobs |
//! | [`entropy`] | k-NN differential entropy, digamma, exact neighbor search |
//! | [`scores`] | TMI and four intra-class-variance alternatives |
//! | [`baselines`] | NCE, LEEP, LogME, H-Score, TransRate |
//! | [`eval`] | Kendall tau-b, top-k hit, ranking reports, k sweeps |
//! | [`methods`] | name registry and a single dispatch entry point |
//!
//! ```
//! use tmi_core::ingest::{generate_synthetic, SyntheticSpec};
//! use tmi_core::scores::tmi;
//!
//! let spec = SyntheticSpec {
//!     num_classes: 2,
//!     samples_per_class: vec![200, 200],
//!     dim: 2,
//!     class_means: vec![vec![0.0, 0.0], vec![5.0, 5.0]],
//!     class_spreads: vec![1.0, 1.0],
//!     seed: 7,
//! };
//! let (features, labels) = generate_synthetic(&spec).unwrap();
//! let score = tmi(&features, &labels, 3).unwrap();
//! assert!(score.value.is_finite());
//! ```

pub mod baselines;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod methods;
mod result;
pub mod scores;

pub use error::{Error, Result};
pub use result::{ClassTerm, ScoreResult};
