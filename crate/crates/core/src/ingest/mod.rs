//! Feature, label, prediction and accuracy data.
//!
//! Everything here is validated on construction and immutable afterwards, so
//! the scorers downstream never re-check finiteness or label bounds.

mod io;
mod synth;

pub use io::{
    load_accuracies, load_features, load_labels, load_source_predictions, save_accuracies,
    save_features, save_labels, FeatureFormat, BINARY_MAGIC, BINARY_VERSION,
};
pub use synth::{generate_synthetic, SyntheticSpec};

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Dense `n x d` matrix of finite reals, stored row-major. Row `i` is the
/// embedding of target sample `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major data. Fails on a shape mismatch, an
    /// empty dimension, or any non-finite entry (reported by 0-based index).
    pub fn new(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Validation(format!(
                "feature matrix must have n >= 1 and d >= 1, got {n}x{d}"
            )));
        }
        if data.len() != n * d {
            return Err(Error::Validation(format!(
                "feature data has {} values, expected {n}x{d} = {}",
                data.len(),
                n * d
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite feature value {} at row {}, column {}",
                data[pos],
                pos / d,
                pos % d
            )));
        }
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Validation(format!(
                    "row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::new(data, n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    /// Row-major backing slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Applies `f` to every entry. The result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.data.iter().map(|&v| f(v)).collect(), self.n, self.d)
    }

    /// Adds `offset` to every row.
    pub fn translate(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.d {
            return Err(Error::Validation(format!(
                "offset has length {}, expected {}",
                offset.len(),
                self.d
            )));
        }
        let data = self
            .rows()
            .flat_map(|r| r.iter().zip(offset).map(|(a, b)| a + b))
            .collect();
        Self::new(data, self.n, self.d)
    }

    /// Gathers the given rows, in order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self::new(data, indices.len(), self.d)
    }

    /// Per-column z-scoring. Returns the standardized matrix and the indices
    /// of zero-variance columns, which are only centered.
    pub fn standardize(&self) -> (Self, Vec<usize>) {
        let n = self.n as f64;
        let mut mean = vec![0.0; self.d];
        for row in self.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; self.d];
        for row in self.rows() {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let mut constant = Vec::new();
        let scale: Vec<f64> = var
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    constant.push(j);
                    1.0
                }
            })
            .collect();
        let data = self
            .rows()
            .flat_map(|r| {
                r.iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((v, m), s)| (v - m) / s)
            })
            .collect();
        (
            Self {
                data,
                n: self.n,
                d: self.d,
            },
            constant,
        )
    }
}

/// Class ids in `[0, num_classes)`, one per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabelVector {
    /// With `num_classes = None`, C is inferred as `max + 1`.
    pub fn new(labels: Vec<usize>, num_classes: Option<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Validation("label vector is empty".into()));
        }
        let max = labels.iter().copied().max().unwrap_or(0);
        let num_classes = match num_classes {
            Some(0) => return Err(Error::Validation("num_classes must be >= 1".into())),
            Some(c) => {
                if let Some(pos) = labels.iter().position(|&y| y >= c) {
                    return Err(Error::Validation(format!(
                        "label {} at index {pos} is out of range [0, {c})",
                        labels[pos]
                    )));
                }
                c
            }
            None => max + 1,
        };
        Ok(Self {
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    /// Per-class sample counts, indexed by class id.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Row indices of each class, in original order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (i, &y) in self.labels.iter().enumerate() {
            out[y].push(i);
        }
        out
    }

    pub(crate) fn check_paired(&self, n: usize, what: &str) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::Validation(format!(
                "{what} has {n} rows but label vector has {} entries",
                self.labels.len()
            )));
        }
        Ok(())
    }
}

/// Source-classifier probabilities, `n x C_s`, every row a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SourcePredictionMatrix {
    probs: FeatureMatrix,
}

impl SourcePredictionMatrix {
    pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

    pub fn new(probs: FeatureMatrix) -> Result<Self> {
        for (i, row) in probs.rows().enumerate() {
            if let Some(j) = row.iter().position(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::Validation(format!(
                    "source prediction {} at row {i}, column {j} is outside [0, 1]",
                    row[j]
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > Self::ROW_SUM_TOLERANCE {
                return Err(Error::Validation(format!(
                    "source prediction row {i} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self { probs })
    }

    pub fn n(&self) -> usize {
        self.probs.n()
    }

    pub fn num_source_classes(&self) -> usize {
        self.probs.d()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.probs.row(i)
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.probs.rows()
    }
}

/// Fine-tuned accuracies of the candidate models, keyed by model id.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyVector {
    model_ids: Vec<String>,
    accuracies: Vec<f64>,
}

impl AccuracyVector {
    pub fn new(model_ids: Vec<String>, accuracies: Vec<f64>) -> Result<Self> {
        if model_ids.len() != accuracies.len() {
            return Err(Error::Validation(format!(
                "{} model ids but {} accuracies",
                model_ids.len(),
                accuracies.len()
            )));
        }
        let mut seen = HashSet::new();
        for id in &model_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate model id {id:?}")));
            }
        }
        for (id, a) in model_ids.iter().zip(&accuracies) {
            if !a.is_finite() || !(0.0..=1.0).contains(a) {
                return Err(Error::Validation(format!(
                    "accuracy {a} for model {id:?} is not in [0, 1]"
                )));
            }
        }
        Ok(Self {
            model_ids,
            accuracies,
        })
    }

    pub fn len(&self) -> usize {
        self.model_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model_ids.is_empty()
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn accuracies(&self) -> &[f64] {
        &self.accuracies
    }

    pub fn get(&self, model_id: &str) -> Option<f64> {
        self.model_ids
            .iter()
            .position(|m| m == model_id)
            .map(|i| self.accuracies[i])
    }
}

/// Partitions `features` by label. Entry `c` holds the class-`c` rows in
/// their original relative order, or `None` when the class has no samples.
pub fn split_by_class(
    features: &FeatureMatrix,
    labels: &LabelVector,
) -> Result<Vec<Option<FeatureMatrix>>> {
    labels.check_paired(features.n(), "feature matrix")?;
    labels
        .class_indices()
        .iter()
        .map(|idx| {
            if idx.is_empty() {
                Ok(None)
            } else {
                features.select_rows(idx).map(Some)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[f64]]) -> FeatureMatrix {
        FeatureMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rejects_non_finite_with_coordinates() {
        let err = FeatureMatrix::new(vec![1.0, 2.0, f64::NAN, 4.0], 2, 2).unwrap_err();
        assert!(err.to_string().contains("row 1, column 0"), "{err}");
        assert!(FeatureMatrix::new(vec![f64::INFINITY], 1, 1).is_err());
        assert!(FeatureMatrix::new(vec![], 0, 3).is_err());
    }

    #[test]
    fn labels_infer_and_bound() {
        let l = LabelVector::new(vec![0, 1, 0], None).unwrap();
        assert_eq!(l.num_classes(), 2);
        assert!(LabelVector::new(vec![2], Some(2)).is_err());
        let gaps = LabelVector::new(vec![0, 3], Some(5)).unwrap();
        assert_eq!(gaps.counts(), vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn split_small_example() {
        let x = fm(&[&[1.0], &[2.0], &[3.0]]);
        let y = LabelVector::new(vec![0, 1, 0], None).unwrap();
        let parts = split_by_class(&x, &y).unwrap();
        assert_eq!(parts[0].as_ref().unwrap(), &fm(&[&[1.0], &[3.0]]));
        assert_eq!(parts[1].as_ref().unwrap(), &fm(&[&[2.0]]));
    }

    #[test]
    fn split_single_class_is_identity() {
        let x = fm(&[&[1.0, 5.0], &[2.0, 6.0], &[3.0, 7.0]]);
        let y = LabelVector::new(vec![0, 0, 0], None).unwrap();
        let parts = split_by_class(&x, &y).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].as_ref().unwrap(), &x);
    }

    #[test]
    fn split_length_mismatch() {
        let x = fm(&[&[1.0], &[2.0]]);
        let y = LabelVector::new(vec![0, 1, 0], None).unwrap();
        assert!(matches!(split_by_class(&x, &y), Err(Error::Validation(_))));
    }

    #[test]
    fn split_empty_class_is_none() {
        let x = fm(&[&[1.0], &[2.0]]);
        let y = LabelVector::new(vec![0, 2], Some(3)).unwrap();
        let parts = split_by_class(&x, &y).unwrap();
        assert!(parts[1].is_none());
    }

    #[test]
    fn source_predictions_validated() {
        let ok = fm(&[&[0.25, 0.75], &[1.0, 0.0]]);
        assert!(SourcePredictionMatrix::new(ok).is_ok());
        let bad_sum = fm(&[&[0.5, 0.6]]);
        assert!(SourcePredictionMatrix::new(bad_sum).is_err());
        let negative = fm(&[&[-0.5, 1.5]]);
        assert!(SourcePredictionMatrix::new(negative).is_err());
    }

    #[test]
    fn accuracies_validated() {
        assert!(AccuracyVector::new(vec!["a".into(), "a".into()], vec![0.1, 0.2]).is_err());
        assert!(AccuracyVector::new(vec!["a".into()], vec![1.5]).is_err());
        let acc = AccuracyVector::new(vec!["a".into(), "b".into()], vec![0.1, 0.2]).unwrap();
        assert_eq!(acc.get("b"), Some(0.2));
    }

    #[test]
    fn standardize_zero_variance_column() {
        let x = fm(&[&[1.0, 3.0], &[3.0, 3.0]]);
        let (z, constant) = x.standardize();
        assert_eq!(constant, vec![1]);
        assert_eq!(z.as_slice(), &[-1.0, 0.0, 1.0, 0.0]);
    }
}
