//! Seeded isotropic Gaussian blobs.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`),
//! and standard normals come from `rand_distr::StandardNormal` (ziggurat).
//! Draws are consumed class by class, sample by sample, coordinate by
//! coordinate, so a spec maps to exactly one output. Both crate versions are
//! pinned in the manifest; changing either changes generated data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{FeatureMatrix, LabelVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_classes: usize,
    pub samples_per_class: Vec<usize>,
    pub dim: usize,
    /// `num_classes` rows of length `dim`.
    pub class_means: Vec<Vec<f64>>,
    /// Isotropic standard deviation of each class.
    pub class_spreads: Vec<f64>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let c = self.num_classes;
        if c == 0 || self.dim == 0 {
            return Err(Error::Validation(
                "synthetic spec needs num_classes >= 1 and dim >= 1".into(),
            ));
        }
        if self.samples_per_class.len() != c
            || self.class_means.len() != c
            || self.class_spreads.len() != c
        {
            return Err(Error::Validation(format!(
                "synthetic spec: samples_per_class, class_means and class_spreads must all have {c} entries"
            )));
        }
        if let Some(i) = self.samples_per_class.iter().position(|&s| s == 0) {
            return Err(Error::Validation(format!("class {i} has zero samples")));
        }
        if let Some(i) = self.class_means.iter().position(|m| m.len() != self.dim) {
            return Err(Error::Validation(format!(
                "class {i} mean has length {}, expected {}",
                self.class_means[i].len(),
                self.dim
            )));
        }
        if self.class_means.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation("class means must be finite".into()));
        }
        if let Some(i) = self
            .class_spreads
            .iter()
            .position(|&s| !(s.is_finite() && s > 0.0))
        {
            return Err(Error::Validation(format!(
                "class {i} spread {} must be finite and > 0",
                self.class_spreads[i]
            )));
        }
        Ok(())
    }
}

/// Draws `mean_c + spread_c * z` with `z` standard normal for every sample.
/// Rows are grouped by class in class order.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(FeatureMatrix, LabelVector)> {
    spec.validate()?;
    let total: usize = spec.samples_per_class.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut data = Vec::with_capacity(total * spec.dim);
    let mut labels = Vec::with_capacity(total);
    for (c, ((&count, mean), &spread)) in spec
        .samples_per_class
        .iter()
        .zip(&spec.class_means)
        .zip(&spec.class_spreads)
        .enumerate()
    {
        for _ in 0..count {
            for m in mean {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(m + spread * z);
            }
            labels.push(c);
        }
    }
    Ok((
        FeatureMatrix::new(data, total, spec.dim)?,
        LabelVector::new(labels, Some(spec.num_classes))?,
    ))
}
