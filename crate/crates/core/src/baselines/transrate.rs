use nalgebra::DMatrix;

use super::{center_columns, to_dmatrix, BaselineConfig};
use crate::error::{Error, Result};
use crate::ingest::{FeatureMatrix, LabelVector};
use crate::result::{timed, ClassTerm, ScoreResult};

/// Coding rate `½ logdet(I + d/(m ε²) ZᵀZ)` of an `m x d` matrix.
pub fn coding_rate(z: &DMatrix<f64>, eps: f64) -> Result<f64> {
    let (m, d) = z.shape();
    let scale = d as f64 / (m as f64 * eps * eps);
    let gram = z.transpose() * z * scale + DMatrix::identity(d, d);
    if gram.iter().any(|v| !v.is_finite()) {
        return Err(Error::Linalg(
            "coding-rate matrix has non-finite entries".into(),
        ));
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Linalg("coding-rate matrix is not positive definite".into()))?;
    Ok(chol.l().diagonal().iter().map(|v| v.ln()).sum())
}

/// Rate reduction `R(Z) − Σ_c (n_c/n) R(Z_c)` with every row centered by
/// the global mean.
pub fn transrate(
    features: &FeatureMatrix,
    labels: &LabelVector,
    config: &BaselineConfig,
) -> Result<ScoreResult> {
    config.validate()?;
    labels.check_paired(features.n(), "feature matrix")?;
    if features.n() < 2 {
        return Err(Error::Validation("TransRate needs n >= 2".into()));
    }
    timed(|| {
        let eps = config.transrate_eps;
        let n = features.n();
        let mut z = to_dmatrix(features);
        center_columns(&mut z);
        let total = coding_rate(&z, eps)?;
        let mut per_class = Vec::new();
        for (c, idx) in labels.class_indices().iter().enumerate() {
            if idx.is_empty() {
                continue;
            }
            let zc = z.select_rows(idx);
            per_class.push(ClassTerm {
                class_id: c,
                n_c: idx.len(),
                weight: idx.len() as f64 / n as f64,
                value: coding_rate(&zc, eps)?,
            });
        }
        let conditional: f64 = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("transrate", total - conditional);
        result.per_class = per_class;
        result.notes.push(format!("R(Z) = {total}, eps = {eps:e}"));
        Ok(result)
    })
}
