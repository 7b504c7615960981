//! TMI and the intra-class-variance alternatives.
//!
//! TMI is the conditional entropy of the embeddings given the label,
//!
//! ```text
//! H(X | Y) = Σ_c (n_c / n) Ĥ(X_c)
//! ```
//!
//! with each class entropy from the k-NN estimator in [`crate::entropy`].
//! Larger values predict better transfer.
//!
//! The ICV measures report compactness (smaller means tighter classes) and
//! are returned raw; orientation is applied by [`crate::eval`].

use crate::entropy::{knn_entropy, squared_distance, NeighborBackend};
use crate::error::{Error, Result};
use crate::ingest::{FeatureMatrix, LabelVector};
use crate::result::{timed, ClassTerm, ScoreResult};

pub const DEFAULT_K: usize = 3;
pub const DEFAULT_SNCA_TEMPERATURE: f64 = 1.0;
pub const DEFAULT_MS_ALPHA: f64 = 2.0;
pub const DEFAULT_MS_LAMBDA: f64 = 0.5;

pub fn tmi(features: &FeatureMatrix, labels: &LabelVector, k: usize) -> Result<ScoreResult> {
    tmi_with_backend(features, labels, k, NeighborBackend::default())
}

/// TMI with an explicit neighbor-search backend.
///
/// Classes with fewer than two samples are skipped and the remaining
/// weights renormalized; `k` is clamped to `n_c - 1` per class. Both events
/// are recorded in `warnings`.
pub fn tmi_with_backend(
    features: &FeatureMatrix,
    labels: &LabelVector,
    k: usize,
    backend: NeighborBackend,
) -> Result<ScoreResult> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    labels.check_paired(features.n(), "feature matrix")?;
    timed(|| {
        let mut warnings = Vec::new();
        let mut included = Vec::new();
        for (c, idx) in labels.class_indices().into_iter().enumerate() {
            match idx.len() {
                0 => {}
                1 => warnings.push(format!("class {c} skipped: only 1 sample")),
                n_c => included.push((c, idx, n_c)),
            }
        }
        if included.is_empty() {
            return Err(Error::NoScorableClass(
                "TMI needs at least one class with 2 or more samples".into(),
            ));
        }
        let n_incl: usize = included.iter().map(|(_, _, n_c)| n_c).sum();
        let mut per_class = Vec::with_capacity(included.len());
        for (c, idx, n_c) in included {
            let k_c = k.min(n_c - 1);
            if k_c < k {
                warnings.push(format!(
                    "class {c}: k clamped from {k} to {k_c} (n_c = {n_c})"
                ));
            }
            let est = knn_entropy(&features.select_rows(&idx)?, k_c, backend)?;
            if est.num_clamped > 0 {
                warnings.push(format!(
                    "class {c}: {} zero neighbor distances floored",
                    est.num_clamped
                ));
            }
            per_class.push(ClassTerm {
                class_id: c,
                n_c,
                weight: n_c as f64 / n_incl as f64,
                value: est.value,
            });
        }
        let value = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("tmi", value);
        result.per_class = per_class;
        result.warnings = warnings;
        result
            .notes
            .push(format!("k-NN entropy in nats, k = {k}; higher is better"));
        Ok(result)
    })
}

/// Mean squared distance over all same-class pairs `i < j`.
pub fn icv_contrast(features: &FeatureMatrix, labels: &LabelVector) -> Result<ScoreResult> {
    labels.check_paired(features.n(), "feature matrix")?;
    timed(|| {
        let mut total_pairs = 0usize;
        let mut terms = Vec::new();
        for (c, idx) in labels.class_indices().iter().enumerate() {
            let n_c = idx.len();
            if n_c < 2 {
                continue;
            }
            // Σ_{i<j} ‖r_i − r_j‖² = n_c · Σ_i ‖r_i − μ_c‖²
            let pairs = n_c * (n_c - 1) / 2;
            let scatter = class_scatter(features, idx);
            terms.push((c, n_c, pairs, n_c as f64 * scatter / pairs as f64));
            total_pairs += pairs;
        }
        if total_pairs == 0 {
            return Err(Error::NoScorableClass("no same-class pair".into()));
        }
        let per_class: Vec<ClassTerm> = terms
            .into_iter()
            .map(|(c, n_c, pairs, mean)| ClassTerm {
                class_id: c,
                n_c,
                weight: pairs as f64 / total_pairs as f64,
                value: mean,
            })
            .collect();
        let value = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("icv_contrast", value);
        result.per_class = per_class;
        result.notes.push(compactness_note());
        Ok(result)
    })
}

/// Mean squared distance of each sample to its class mean.
pub fn icv_center(features: &FeatureMatrix, labels: &LabelVector) -> Result<ScoreResult> {
    labels.check_paired(features.n(), "feature matrix")?;
    timed(|| {
        let n = features.n() as f64;
        let per_class: Vec<ClassTerm> = labels
            .class_indices()
            .iter()
            .enumerate()
            .filter(|(_, idx)| !idx.is_empty())
            .map(|(c, idx)| ClassTerm {
                class_id: c,
                n_c: idx.len(),
                weight: idx.len() as f64 / n,
                value: class_scatter(features, idx) / idx.len() as f64,
            })
            .collect();
        let value = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("icv_center", value);
        result.per_class = per_class;
        result.notes.push(compactness_note());
        Ok(result)
    })
}

/// Soft-nearest-neighbor loss: mean over samples of
/// `−ln(Σ_same exp(−‖r_i − r_j‖²/T) / Σ_all exp(−‖r_i − r_j‖²/T))`.
///
/// Samples without a same-class peer are excluded with a warning.
pub fn icv_snca(
    features: &FeatureMatrix,
    labels: &LabelVector,
    temperature: f64,
) -> Result<ScoreResult> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::Domain(format!(
            "SNCA temperature must be > 0, got {temperature}"
        )));
    }
    labels.check_paired(features.n(), "feature matrix")?;
    timed(|| {
        let y = labels.as_slice();
        let n = features.n();
        let counts = labels.counts();
        let mut warnings = Vec::new();
        let mut class_sum = vec![0.0; labels.num_classes()];
        let mut class_n = vec![0usize; labels.num_classes()];
        let mut logits = Vec::with_capacity(n);
        for i in 0..n {
            if counts[y[i]] < 2 {
                warnings.push(format!(
                    "sample {i} (class {}) has no same-class peer; excluded",
                    y[i]
                ));
                continue;
            }
            let ri = features.row(i);
            logits.clear();
            logits.extend(
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (j, -squared_distance(ri, features.row(j)) / temperature)),
            );
            let mut max_all = f64::NEG_INFINITY;
            let mut max_same = f64::NEG_INFINITY;
            for &(j, a) in &logits {
                max_all = max_all.max(a);
                if y[j] == y[i] {
                    max_same = max_same.max(a);
                }
            }
            let mut sum_all = 0.0;
            let mut sum_same = 0.0;
            for &(j, a) in &logits {
                sum_all += (a - max_all).exp();
                if y[j] == y[i] {
                    sum_same += (a - max_same).exp();
                }
            }
            let log_ratio = (max_same + sum_same.ln()) - (max_all + sum_all.ln());
            class_sum[y[i]] -= log_ratio;
            class_n[y[i]] += 1;
        }
        let n_incl: usize = class_n.iter().sum();
        if n_incl == 0 {
            return Err(Error::NoScorableClass(
                "every sample lacks a same-class peer".into(),
            ));
        }
        let per_class = per_class_means(&class_sum, &class_n, n_incl);
        let value = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("icv_snca", value);
        result.per_class = per_class;
        result.warnings = warnings;
        result.notes.push(format!(
            "soft-nearest-neighbor negative log-likelihood, temperature = {temperature}; \
             lower means tighter classes"
        ));
        Ok(result)
    })
}

/// Positive-pair term of the multi-similarity loss on L2-normalized rows:
/// mean over samples of `(1/α) ln(1 + Σ_same exp(−α (s_ij − λ)))`.
///
/// Samples with no same-class peer contribute 0 with a warning.
pub fn icv_ms(
    features: &FeatureMatrix,
    labels: &LabelVector,
    alpha: f64,
    lambda: f64,
) -> Result<ScoreResult> {
    if !(alpha > 0.0 && alpha.is_finite()) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "MS needs alpha > 0 and finite lambda, got alpha = {alpha}, lambda = {lambda}"
        )));
    }
    labels.check_paired(features.n(), "feature matrix")?;
    timed(|| {
        let normalized = l2_normalize_rows(features)?;
        let n = features.n();
        let y = labels.as_slice();
        let mut warnings = Vec::new();
        let mut class_sum = vec![0.0; labels.num_classes()];
        let mut class_n = vec![0usize; labels.num_classes()];
        let mut any_pair = false;
        let mut exponents = Vec::new();
        for (i, ri) in normalized.iter().enumerate() {
            exponents.clear();
            exponents.push(0.0);
            for (j, rj) in normalized.iter().enumerate() {
                if j != i && y[j] == y[i] {
                    let s: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                    exponents.push(-alpha * (s - lambda));
                }
            }
            class_n[y[i]] += 1;
            if exponents.len() == 1 {
                warnings.push(format!(
                    "sample {i} (class {}) has no same-class peer; contributes 0",
                    y[i]
                ));
                continue;
            }
            any_pair = true;
            class_sum[y[i]] += log_sum_exp(&exponents) / alpha;
        }
        if !any_pair {
            return Err(Error::NoScorableClass("no same-class pair".into()));
        }
        let per_class = per_class_means(&class_sum, &class_n, n);
        let value = per_class.iter().map(|t| t.weight * t.value).sum();
        let mut result = ScoreResult::new("icv_ms", value);
        result.per_class = per_class;
        result.warnings = warnings;
        result.notes.push(format!(
            "multi-similarity positive term, alpha = {alpha}, lambda = {lambda}; \
             lower means tighter classes"
        ));
        Ok(result)
    })
}

fn compactness_note() -> String {
    "squared Euclidean dispersion; lower means tighter classes".into()
}

/// Σ_i ‖r_i − μ‖² over the given rows.
fn class_scatter(features: &FeatureMatrix, idx: &[usize]) -> f64 {
    let d = features.d();
    let mut mean = vec![0.0; d];
    for &i in idx {
        for (m, v) in mean.iter_mut().zip(features.row(i)) {
            *m += v;
        }
    }
    let inv = 1.0 / idx.len() as f64;
    mean.iter_mut().for_each(|m| *m *= inv);
    idx.iter()
        .map(|&i| squared_distance(features.row(i), &mean))
        .sum()
}

fn per_class_means(sums: &[f64], counts: &[usize], total: usize) -> Vec<ClassTerm> {
    sums.iter()
        .zip(counts)
        .enumerate()
        .filter(|(_, (_, &n_c))| n_c > 0)
        .map(|(c, (&s, &n_c))| ClassTerm {
            class_id: c,
            n_c,
            weight: n_c as f64 / total as f64,
            value: s / n_c as f64,
        })
        .collect()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn l2_normalize_rows(features: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
    features
        .rows()
        .enumerate()
        .map(|(i, r)| {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Validation(format!(
                    "feature row {i} has zero norm; cosine similarity undefined"
                )));
            }
            Ok(r.iter().map(|v| v / norm).collect())
        })
        .collect()
}
