//! Metrics built from the empirical joint of target labels and source
//! predictions.

use crate::error::Result;
use crate::ingest::{LabelVector, SourcePredictionMatrix};
use crate::result::{timed, ScoreResult};

pub const LEEP_PROBABILITY_FLOOR: f64 = 1e-30;

/// Negative conditional entropy −H(Y | Z) of the target labels given the
/// hard source pseudo-labels `z_i = argmax_j θ_i(j)` (ties to the lowest
/// index).
pub fn nce(source_preds: &SourcePredictionMatrix, labels: &LabelVector) -> Result<ScoreResult> {
    labels.check_paired(source_preds.n(), "source prediction matrix")?;
    timed(|| {
        let cs = source_preds.num_source_classes();
        let mut joint = vec![vec![0usize; cs]; labels.num_classes()];
        let mut marginal = vec![0usize; cs];
        for (row, &y) in source_preds.rows().zip(labels.as_slice()) {
            let z = argmax(row);
            joint[y][z] += 1;
            marginal[z] += 1;
        }
        let n = labels.len() as f64;
        let mut value = 0.0;
        for row in &joint {
            for (&count, &mz) in row.iter().zip(&marginal) {
                if count > 0 {
                    let p = count as f64 / n;
                    value += p * (count as f64 / mz as f64).ln();
                }
            }
        }
        let mut result = ScoreResult::new("nce", value);
        result
            .notes
            .push("-H(Y|Z) in nats; 0 is the maximum".into());
        Ok(result)
    })
}

/// Log expected empirical prediction: the mean log-likelihood of each
/// target label under `Σ_z P̂(y | z) θ_i(z)`.
pub fn leep(source_preds: &SourcePredictionMatrix, labels: &LabelVector) -> Result<ScoreResult> {
    labels.check_paired(source_preds.n(), "source prediction matrix")?;
    timed(|| {
        let cs = source_preds.num_source_classes();
        let n = labels.len() as f64;
        let y = labels.as_slice();
        let mut joint = vec![vec![0.0; cs]; labels.num_classes()];
        for (row, &yi) in source_preds.rows().zip(y) {
            for (j, &p) in joint[yi].iter_mut().zip(row) {
                *j += p;
            }
        }
        for row in &mut joint {
            row.iter_mut().for_each(|v| *v /= n);
        }
        let mut marginal = vec![0.0; cs];
        for row in &joint {
            for (m, v) in marginal.iter_mut().zip(row) {
                *m += v;
            }
        }
        let conditional: Vec<Vec<f64>> = joint
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&marginal)
                    .map(|(&j, &m)| if m > 0.0 { j / m } else { 0.0 })
                    .collect()
            })
            .collect();
        let mut warnings = Vec::new();
        let mut total = 0.0;
        for (i, (row, &yi)) in source_preds.rows().zip(y).enumerate() {
            let p: f64 = conditional[yi]
                .iter()
                .zip(row)
                .zip(&marginal)
                .filter(|(_, &m)| m > 0.0)
                .map(|((c, t), _)| c * t)
                .sum();
            let p = if p > 0.0 {
                p
            } else {
                warnings.push(format!(
                    "sample {i}: predicted label probability is 0, floored at {LEEP_PROBABILITY_FLOOR:e}"
                ));
                LEEP_PROBABILITY_FLOOR
            };
            total += p.ln();
        }
        let mut result = ScoreResult::new("leep", total / n);
        result.warnings = warnings;
        result
            .notes
            .push("mean log-likelihood in nats; 0 is the maximum".into());
        Ok(result)
    })
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}
