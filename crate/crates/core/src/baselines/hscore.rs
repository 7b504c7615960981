use nalgebra::DMatrix;

use super::{center_columns, to_dmatrix, BaselineConfig};
use crate::error::{Error, Result};
use crate::ingest::{FeatureMatrix, LabelVector};
use crate::result::{timed, ScoreResult};

/// `trace(Σ_f⁻¹ Σ_b)`, where `Σ_f` is the (ridged) feature covariance and
/// `Σ_b` the covariance of the per-sample class means. Both use 1/n
/// normalization.
pub fn hscore(
    features: &FeatureMatrix,
    labels: &LabelVector,
    config: &BaselineConfig,
) -> Result<ScoreResult> {
    config.validate()?;
    labels.check_paired(features.n(), "feature matrix")?;
    if features.n() < 2 {
        return Err(Error::Validation("H-Score needs n >= 2".into()));
    }
    timed(|| {
        let n = features.n() as f64;
        let d = features.d();
        let mut x = to_dmatrix(features);
        center_columns(&mut x);
        let cov = x.transpose() * &x / n;
        let ridge = config
            .hscore_ridge
            .unwrap_or_else(|| 1e-8 * cov.trace() / d as f64);
        let sigma_f = &cov + DMatrix::identity(d, d) * ridge;

        let mut between = DMatrix::zeros(d, d);
        for idx in labels.class_indices().iter().filter(|i| !i.is_empty()) {
            let mut mean = nalgebra::DVector::zeros(d);
            for &i in idx {
                mean += x.row(i).transpose();
            }
            mean /= idx.len() as f64;
            between += &mean * mean.transpose() * (idx.len() as f64 / n);
        }

        let chol = sigma_f.cholesky().ok_or_else(|| {
            Error::Linalg(format!(
                "feature covariance is not positive definite with ridge {ridge:e}"
            ))
        })?;
        let value = chol.solve(&between).trace();
        let mut result = ScoreResult::new("hscore", value);
        result.notes.push(format!("ridge = {ridge:e}"));
        Ok(result)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_class_is_zero() {
        let x = FeatureMatrix::from_rows(&[[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]]).unwrap();
        let y = LabelVector::new(vec![0, 0, 0], None).unwrap();
        let v = hscore(&x, &y, &BaselineConfig::default()).unwrap().value;
        assert!(v.abs() < 1e-15, "{v}");
    }

    #[test]
    fn constant_features_fail_with_ridge_named() {
        let x = FeatureMatrix::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
        let y = LabelVector::new(vec![0, 1, 0], None).unwrap();
        let err = hscore(&x, &y, &BaselineConfig::default()).unwrap_err();
        assert!(err.to_string().contains("ridge 0e0"), "{err}");
    }
}
