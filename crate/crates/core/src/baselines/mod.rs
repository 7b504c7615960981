//! Comparison metrics: NCE, LEEP, LogME, H-Score and TransRate.
//!
//! NCE and LEEP consume source-classifier probabilities; the other three
//! work on the embeddings directly. All of them are higher-is-better.

mod hscore;
mod label_transfer;
mod logme;
mod transrate;

pub use hscore::hscore;
pub use label_transfer::{leep, nce, LEEP_PROBABILITY_FLOOR};
pub use logme::{logme, logme_fits, EvidenceFit};
pub use transrate::{coding_rate, transrate};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Ridge added to the H-Score feature covariance. `None` selects
    /// `1e-8 * trace(cov) / d`.
    pub hscore_ridge: Option<f64>,
    pub logme_max_iter: usize,
    pub logme_tol: f64,
    pub transrate_eps: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            hscore_ridge: None,
            logme_max_iter: 100,
            logme_tol: 1e-6,
            transrate_eps: 1e-4,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} must be > 0, got {v}")))
            }
        };
        if let Some(r) = self.hscore_ridge {
            positive("hscore_ridge", r)?;
        }
        if self.logme_max_iter == 0 {
            return Err(Error::Validation("logme_max_iter must be >= 1".into()));
        }
        positive("logme_tol", self.logme_tol)?;
        positive("transrate_eps", self.transrate_eps)
    }
}

pub(crate) fn to_dmatrix(features: &FeatureMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(features.n(), features.d(), features.as_slice())
}

/// Subtracts the column means.
pub(crate) fn center_columns(x: &mut DMatrix<f64>) {
    let n = x.nrows() as f64;
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
}
