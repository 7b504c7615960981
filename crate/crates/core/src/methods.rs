//! Closed registry of scoring methods with stable names.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{self, BaselineConfig};
use crate::error::{Error, Result};
use crate::eval::Orientation;
use crate::ingest::{FeatureMatrix, LabelVector, SourcePredictionMatrix};
use crate::result::ScoreResult;
use crate::scores::{
    self, DEFAULT_K, DEFAULT_MS_ALPHA, DEFAULT_MS_LAMBDA, DEFAULT_SNCA_TEMPERATURE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tmi,
    IcvContrast,
    IcvCenter,
    IcvSnca,
    IcvMs,
    Nce,
    Leep,
    Logme,
    Hscore,
    Transrate,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Tmi,
        Method::IcvContrast,
        Method::IcvCenter,
        Method::IcvSnca,
        Method::IcvMs,
        Method::Nce,
        Method::Leep,
        Method::Logme,
        Method::Hscore,
        Method::Transrate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Tmi => "tmi",
            Method::IcvContrast => "icv_contrast",
            Method::IcvCenter => "icv_center",
            Method::IcvSnca => "icv_snca",
            Method::IcvMs => "icv_ms",
            Method::Nce => "nce",
            Method::Leep => "leep",
            Method::Logme => "logme",
            Method::Hscore => "hscore",
            Method::Transrate => "transrate",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Method::IcvContrast | Method::IcvCenter | Method::IcvSnca | Method::IcvMs => {
                Orientation::LowerBetter
            }
            _ => Orientation::HigherBetter,
        }
    }

    pub fn needs_source_predictions(self) -> bool {
        matches!(self, Method::Nce | Method::Leep)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::Validation(format!(
                    "unknown method {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Hyperparameters for every method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    /// Neighbor count of the entropy estimator.
    pub k: usize,
    pub snca_temperature: f64,
    pub ms_alpha: f64,
    pub ms_lambda: f64,
    pub baselines: BaselineConfig,
    /// Z-score each feature dimension before scoring.
    pub standardize: bool,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            snca_temperature: DEFAULT_SNCA_TEMPERATURE,
            ms_alpha: DEFAULT_MS_ALPHA,
            ms_lambda: DEFAULT_MS_LAMBDA,
            baselines: BaselineConfig::default(),
            standardize: false,
        }
    }
}

impl MethodConfig {
    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let float = || -> Result<f64> {
            value
                .parse()
                .map_err(|_| Error::Validation(format!("{key}: {value:?} is not a number")))
        };
        let int = || -> Result<usize> {
            value
                .parse()
                .map_err(|_| Error::Validation(format!("{key}: {value:?} is not an integer")))
        };
        match key {
            "k" => self.k = int()?,
            "snca_temperature" => self.snca_temperature = float()?,
            "ms_alpha" => self.ms_alpha = float()?,
            "ms_lambda" => self.ms_lambda = float()?,
            "hscore_ridge" => self.baselines.hscore_ridge = Some(float()?),
            "logme_max_iter" => self.baselines.logme_max_iter = int()?,
            "logme_tol" => self.baselines.logme_tol = float()?,
            "transrate_eps" => self.baselines.transrate_eps = float()?,
            "standardize" => {
                self.standardize = value.parse().map_err(|_| {
                    Error::Validation(format!("standardize: {value:?} is not true/false"))
                })?
            }
            other => {
                return Err(Error::Validation(format!(
                    "unknown config key {other:?}; expected one of k, snca_temperature, \
                     ms_alpha, ms_lambda, hscore_ridge, logme_max_iter, logme_tol, \
                     transrate_eps, standardize"
                )))
            }
        }
        Ok(())
    }
}

/// Scores one model with one method.
pub fn score(
    method: Method,
    features: &FeatureMatrix,
    labels: &LabelVector,
    source_preds: Option<&SourcePredictionMatrix>,
    config: &MethodConfig,
) -> Result<ScoreResult> {
    if method.needs_source_predictions() {
        let preds = source_preds.ok_or_else(|| {
            Error::Validation(format!("method {method} requires source predictions"))
        })?;
        return match method {
            Method::Nce => baselines::nce(preds, labels),
            _ => baselines::leep(preds, labels),
        };
    }
    let standardized;
    let mut notes = Vec::new();
    let features = if config.standardize {
        let (z, constant) = features.standardize();
        standardized = z;
        notes.push("features standardized per dimension before scoring".to_string());
        if !constant.is_empty() {
            notes.push(format!(
                "zero-variance feature columns only centered: {constant:?}"
            ));
        }
        &standardized
    } else {
        features
    };
    let mut result = match method {
        Method::Tmi => scores::tmi(features, labels, config.k),
        Method::IcvContrast => scores::icv_contrast(features, labels),
        Method::IcvCenter => scores::icv_center(features, labels),
        Method::IcvSnca => scores::icv_snca(features, labels, config.snca_temperature),
        Method::IcvMs => scores::icv_ms(features, labels, config.ms_alpha, config.ms_lambda),
        Method::Logme => baselines::logme(features, labels, &config.baselines),
        Method::Hscore => baselines::hscore(features, labels, &config.baselines),
        Method::Transrate => baselines::transrate(features, labels, &config.baselines),
        Method::Nce | Method::Leep => unreachable!("handled above"),
    }?;
    result.warnings.extend(notes);
    Ok(result)
}
