//! Maximum log-evidence of Bayesian linear regression from the features to
//! each one-hot class indicator.
//!
//! For targets `t` (length n), features `F` (n x d), prior precision `α`
//! and noise precision `β`, with `s_j` the eigenvalues of `FᵀF` and `m` the
//! posterior mean:
//!
//! ```text
//! L(α, β) = d/2 ln α + n/2 ln β − ½ Σ_j ln(α + β s_j)
//!           − β/2 ‖t − F m‖² − α/2 ‖m‖² − n/2 ln 2π
//! ```
//!
//! `(α, β)` are updated by the MacKay fixed point
//! `α ← γ/‖m‖², β ← (n − γ)/‖t − F m‖²` with `γ = Σ β s_j/(α + β s_j)`.
//! That iteration can lower the evidence when `α` runs off to infinity, so
//! a step is only taken if it does not decrease `L`; otherwise the EM update
//! (which never decreases `L`) is tried, and if neither improves the fit is
//! declared stationary.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{to_dmatrix, BaselineConfig};
use crate::error::{Error, Result};
use crate::ingest::{FeatureMatrix, LabelVector};
use crate::result::{timed, ClassTerm, ScoreResult};

/// Outcome of evidence maximization for one class indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceFit {
    pub class_id: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Log-evidence at the final `(α, β)`, not normalized by n.
    pub evidence: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Log-evidence after initialization and after every accepted step.
    pub trace: Vec<f64>,
}

pub fn logme(
    features: &FeatureMatrix,
    labels: &LabelVector,
    config: &BaselineConfig,
) -> Result<ScoreResult> {
    config.validate()?;
    labels.check_paired(features.n(), "feature matrix")?;
    if features.n() < 2 {
        return Err(Error::Validation("LogME needs n >= 2".into()));
    }
    timed(|| {
        let (fits, mut warnings) = fit_all(features, labels, config)?;
        let n = features.n() as f64;
        let weight = 1.0 / fits.len() as f64;
        let counts = labels.counts();
        let per_class: Vec<ClassTerm> = fits
            .iter()
            .map(|f| ClassTerm {
                class_id: f.class_id,
                n_c: counts[f.class_id],
                weight,
                value: f.evidence / n,
            })
            .collect();
        for f in fits.iter().filter(|f| !f.converged) {
            warnings.push(format!(
                "class {}: evidence maximization stopped at max_iter = {} without converging",
                f.class_id, config.logme_max_iter
            ));
        }
        let value = per_class.iter().map(|t| t.value).sum::<f64>() * weight;
        let mut result = ScoreResult::new("logme", value);
        result.per_class = per_class;
        result.warnings = warnings;
        result
            .notes
            .push("mean over classes of one-vs-all log-evidence / n".into());
        Ok(result)
    })
}

/// Per-class evidence fits, exposed for inspection of the iteration.
pub fn logme_fits(
    features: &FeatureMatrix,
    labels: &LabelVector,
    config: &BaselineConfig,
) -> Result<Vec<EvidenceFit>> {
    config.validate()?;
    labels.check_paired(features.n(), "feature matrix")?;
    Ok(fit_all(features, labels, config)?.0)
}

fn fit_all(
    features: &FeatureMatrix,
    labels: &LabelVector,
    config: &BaselineConfig,
) -> Result<(Vec<EvidenceFit>, Vec<String>)> {
    let f = to_dmatrix(features);
    let gram = f.transpose() * &f;
    let eig = SymmetricEigen::new(gram);
    let spectrum: Vec<f64> = eig.eigenvalues.iter().map(|&s| s.max(0.0)).collect();
    let basis = eig.eigenvectors;
    let counts = labels.counts();
    let mut fits = Vec::new();
    let mut warnings = Vec::new();
    for (c, &n_c) in counts.iter().enumerate() {
        if n_c == 0 {
            warnings.push(format!("class {c} has no samples; skipped"));
            continue;
        }
        let target = DVector::from_iterator(
            labels.len(),
            labels
                .as_slice()
                .iter()
                .map(|&y| if y == c { 1.0 } else { 0.0 }),
        );
        let problem = Regression::new(&f, &basis, &spectrum, target);
        fits.push(problem.maximize(c, config));
    }
    if fits.is_empty() {
        return Err(Error::NoScorableClass("no class has samples".into()));
    }
    Ok((fits, warnings))
}

struct Regression<'a> {
    f: &'a DMatrix<f64>,
    basis: &'a DMatrix<f64>,
    spectrum: &'a [f64],
    target: DVector<f64>,
    /// Fᵀt in the eigenbasis.
    projected: DVector<f64>,
    floor: f64,
}

struct Posterior {
    evidence: f64,
    /// ‖m‖²
    weight_norm2: f64,
    residual2: f64,
}

impl<'a> Regression<'a> {
    fn new(
        f: &'a DMatrix<f64>,
        basis: &'a DMatrix<f64>,
        spectrum: &'a [f64],
        target: DVector<f64>,
    ) -> Self {
        let projected = basis.transpose() * (f.transpose() * &target);
        let floor = f64::EPSILON * target.norm_squared();
        Self {
            f,
            basis,
            spectrum,
            target,
            projected,
            floor,
        }
    }

    fn posterior(&self, alpha: f64, beta: f64) -> Posterior {
        let n = self.f.nrows() as f64;
        let d = self.spectrum.len() as f64;
        let coeffs = DVector::from_iterator(
            self.spectrum.len(),
            self.projected
                .iter()
                .zip(self.spectrum)
                .map(|(u, s)| beta * u / (alpha + beta * s)),
        );
        let weight_norm2 = coeffs.norm_squared();
        let m = self.basis * coeffs;
        let residual2 = (&self.target - self.f * m).norm_squared();
        let log_det: f64 = self.spectrum.iter().map(|s| (alpha + beta * s).ln()).sum();
        let evidence = 0.5 * d * alpha.ln() + 0.5 * n * beta.ln()
            - 0.5 * log_det
            - 0.5 * beta * residual2
            - 0.5 * alpha * weight_norm2
            - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
        Posterior {
            evidence,
            weight_norm2,
            residual2,
        }
    }

    fn mackay_step(&self, alpha: f64, beta: f64, post: &Posterior) -> (f64, f64) {
        let n = self.f.nrows() as f64;
        let gamma: f64 = self
            .spectrum
            .iter()
            .map(|s| beta * s / (alpha + beta * s))
            .sum();
        (
            gamma / post.weight_norm2.max(self.floor),
            (n - gamma) / post.residual2.max(self.floor),
        )
    }

    fn em_step(&self, alpha: f64, beta: f64, post: &Posterior) -> (f64, f64) {
        let n = self.f.nrows() as f64;
        let d = self.spectrum.len() as f64;
        // tr(S) and tr(FᵀF S) with S = (αI + βFᵀF)⁻¹
        let trace_cov: f64 = self.spectrum.iter().map(|s| 1.0 / (alpha + beta * s)).sum();
        let trace_fit: f64 = self.spectrum.iter().map(|s| s / (alpha + beta * s)).sum();
        (
            d / (post.weight_norm2 + trace_cov).max(self.floor),
            n / (post.residual2 + trace_fit).max(self.floor),
        )
    }

    fn maximize(&self, class_id: usize, config: &BaselineConfig) -> EvidenceFit {
        let (mut alpha, mut beta) = (1.0, 1.0);
        let mut post = self.posterior(alpha, beta);
        let mut trace = vec![post.evidence];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < config.logme_max_iter {
            iterations += 1;
            let accepted = [
                self.mackay_step(alpha, beta, &post),
                self.em_step(alpha, beta, &post),
            ]
            .into_iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0)
            .map(|(a, b)| (a, b, self.posterior(a, b)))
            .find(|(_, _, p)| p.evidence.is_finite() && p.evidence >= post.evidence);
            let Some((next_alpha, next_beta, next_post)) = accepted else {
                converged = true;
                break;
            };
            let change = ((next_alpha - alpha) / alpha)
                .abs()
                .max(((next_beta - beta) / beta).abs());
            alpha = next_alpha;
            beta = next_beta;
            post = next_post;
            trace.push(post.evidence);
            if change < config.logme_tol {
                converged = true;
                break;
            }
        }
        EvidenceFit {
            class_id,
            alpha,
            beta,
            evidence: post.evidence,
            iterations,
            converged,
            trace,
        }
    }
}
