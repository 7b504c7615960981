//! Kozachenko–Leonenko k-nearest-neighbor estimate of differential entropy.
//!
//! For `n` points in `d` dimensions with k-th neighbor distances `ε_i`:
//!
//! ```text
//! Ĥ = ψ(n) − ψ(k) + ln c_d + (d/n) Σ_i ln ε_i      (nats)
//! ```
//!
//! where `c_d` is the volume of the Euclidean unit ball. Distances below
//! [`DISTANCE_FLOOR`] (duplicate points) are raised to it and counted.

mod neighbors;
mod special;

pub use neighbors::{kth_neighbor_distances, NeighborBackend};
pub use special::{digamma, unit_ball_log_volume};

pub(crate) use neighbors::squared_distance;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;

pub const DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Differential entropy in nats.
    pub value: f64,
    pub k_used: usize,
    pub n_points: usize,
    /// Neighbor distances that were raised to [`DISTANCE_FLOOR`].
    pub num_clamped: usize,
}

pub fn knn_entropy(
    points: &FeatureMatrix,
    k: usize,
    backend: NeighborBackend,
) -> Result<EntropyEstimate> {
    let mut distances = kth_neighbor_distances(points, k, backend)?;
    if distances.iter().all(|&e| e == 0.0) && all_identical(points) {
        return Err(Error::DegeneratePointSet);
    }
    let n = points.n();
    let d = points.d() as f64;
    let mut num_clamped = 0;
    // Summing in sorted order makes the result independent of row order and
    // of threading.
    distances.sort_unstable_by(f64::total_cmp);
    let log_sum: f64 = distances
        .iter()
        .map(|&e| {
            if e < DISTANCE_FLOOR {
                num_clamped += 1;
                DISTANCE_FLOOR.ln()
            } else {
                e.ln()
            }
        })
        .sum();
    let value = digamma(n as f64)? - digamma(k as f64)?
        + unit_ball_log_volume(points.d())?
        + d * log_sum / n as f64;
    Ok(EntropyEstimate {
        value,
        k_used: k,
        n_points: n,
        num_clamped,
    })
}

fn all_identical(points: &FeatureMatrix) -> bool {
    let first = points.row(0);
    points.rows().all(|r| r == first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_set_errors() {
        let p = FeatureMatrix::new(vec![2.0; 10], 5, 2).unwrap();
        assert!(matches!(
            knn_entropy(&p, 1, NeighborBackend::Tree),
            Err(Error::DegeneratePointSet)
        ));
    }

    #[test]
    fn duplicates_are_clamped_and_counted() {
        let p = FeatureMatrix::new(vec![0.0, 0.0, 1.0, 2.0, 4.0], 5, 1).unwrap();
        let est = knn_entropy(&p, 1, NeighborBackend::BruteForce).unwrap();
        assert_eq!(est.num_clamped, 2);
        assert!(est.value.is_finite());
        let expected = digamma(5.0).unwrap() - digamma(1.0).unwrap()
            + 2f64.ln()
            + (2.0 * DISTANCE_FLOOR.ln() + 0.0 + 1f64.ln() + 2f64.ln()) / 5.0;
        assert!((est.value - expected).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_three_points() {
        // distances for k=1: [1, 1, 2]
        let p = FeatureMatrix::new(vec![0.0, 1.0, 3.0], 3, 1).unwrap();
        let est = knn_entropy(&p, 1, NeighborBackend::Tree).unwrap();
        let expected = digamma(3.0).unwrap() - digamma(1.0).unwrap() + 2f64.ln() + 2f64.ln() / 3.0;
        assert!((est.value - expected).abs() < 1e-14);
        assert_eq!((est.k_used, est.n_points, est.num_clamped), (1, 3, 0));
    }
}
