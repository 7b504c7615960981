//! Slow, direct reference computations for the test suites.
//!
//! Everything here works on plain `Vec<Vec<f64>>` rows and label slices and
//! deliberately avoids the algorithms used by `tmi-core` (no selection, no
//! log-sum-exp shifting, no Cholesky solves, no merge counting), so that an
//! agreement between the two is evidence rather than tautology.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Rows = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_rows(rng: &mut ChaCha8Rng, n: usize, d: usize, scale: f64) -> Rows {
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    scale * z
                })
                .collect()
        })
        .collect()
}

pub fn uniform_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Rows {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..classes)).collect()
}

/// Rows drawn uniformly then normalized to sum to one.
pub fn random_stochastic(rng: &mut ChaCha8Rng, n: usize, classes: usize) -> Rows {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..classes).map(|_| rng.random::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|v| v / sum).collect()
        })
        .collect()
}

pub fn flatten(rows: &Rows) -> Vec<f64> {
    rows.iter().flatten().copied().collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-th neighbor distance of every point by fully sorting all distances.
pub fn kth_distances_sorted(points: &Rows, k: usize) -> Vec<f64> {
    (0..points.len())
        .map(|i| {
            let mut all: Vec<f64> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| dist2(&points[i], &points[j]))
                .collect();
            all.sort_by(f64::total_cmp);
            all[k - 1].sqrt()
        })
        .collect()
}

/// Differential entropy of N(μ, Σ) in nats given ln det Σ.
pub fn gaussian_entropy(d: usize, log_det_cov: f64) -> f64 {
    0.5 * (d as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + log_det_cov)
}

/// Mean of ‖r_i − r_j‖² over same-class pairs i < j, by double loop.
pub fn contrast_pairs(points: &Rows, labels: &[usize]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if labels[i] == labels[j] {
                sum += dist2(&points[i], &points[j]);
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// (1/n) Σ ‖r_i − μ_{y_i}‖²: one pass for the means, one for the residuals.
pub fn center_two_pass(points: &Rows, labels: &[usize]) -> f64 {
    let d = points[0].len();
    let classes = labels.iter().max().unwrap() + 1;
    let mut sums = vec![vec![0.0; d]; classes];
    let mut counts = vec![0.0; classes];
    for (p, &y) in points.iter().zip(labels) {
        for j in 0..d {
            sums[y][j] += p[j];
        }
        counts[y] += 1.0;
    }
    let means: Rows = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s.iter().map(|v| v / c).collect())
        .collect();
    points
        .iter()
        .zip(labels)
        .map(|(p, &y)| dist2(p, &means[y]))
        .sum::<f64>()
        / points.len() as f64
}

/// Soft-nearest-neighbor term without any overflow protection.
pub fn snca_direct(points: &Rows, labels: &[usize], temperature: f64) -> f64 {
    let mut total = 0.0;
    let mut used = 0;
    for i in 0..points.len() {
        let mut same = 0.0;
        let mut all = 0.0;
        let mut has_peer = false;
        for j in 0..points.len() {
            if j == i {
                continue;
            }
            let w = (-dist2(&points[i], &points[j]) / temperature).exp();
            all += w;
            if labels[j] == labels[i] {
                same += w;
                has_peer = true;
            }
        }
        if has_peer {
            total -= (same / all).ln();
            used += 1;
        }
    }
    total / used as f64
}

/// Multi-similarity positive term, evaluated literally.
pub fn ms_direct(points: &Rows, labels: &[usize], alpha: f64, lambda: f64) -> f64 {
    let unit: Rows = points
        .iter()
        .map(|p| {
            let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            p.iter().map(|v| v / norm).collect()
        })
        .collect();
    let mut total = 0.0;
    for i in 0..unit.len() {
        let mut inner = 0.0;
        let mut has_peer = false;
        for j in 0..unit.len() {
            if j != i && labels[j] == labels[i] {
                let s: f64 = unit[i].iter().zip(&unit[j]).map(|(a, b)| a * b).sum();
                inner += (-alpha * (s - lambda)).exp();
                has_peer = true;
            }
        }
        if has_peer {
            total += (1.0 + inner).ln() / alpha;
        }
    }
    total / unit.len() as f64
}

fn argmax_lowest(row: &[f64]) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.iter().position(|&v| v == best).unwrap()
}

/// −H(Y|Z) by enumerating every (y, z) cell of the joint table.
pub fn nce_enumeration(probs: &Rows, labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    let z: Vec<usize> = probs.iter().map(|r| argmax_lowest(r)).collect();
    let ty = labels.iter().max().unwrap() + 1;
    let tz = probs[0].len();
    let mut value = 0.0;
    for y in 0..ty {
        for zz in 0..tz {
            let joint = (0..labels.len())
                .filter(|&i| labels[i] == y && z[i] == zz)
                .count() as f64
                / n;
            let marginal = z.iter().filter(|&&v| v == zz).count() as f64 / n;
            if joint > 0.0 {
                value += joint * (joint / marginal).ln();
            }
        }
    }
    value
}

/// LEEP with the conditional P(y_i | z) recomputed from scratch per sample.
#[allow(clippy::needless_range_loop)]
pub fn leep_direct(probs: &Rows, labels: &[usize]) -> f64 {
    let n = labels.len();
    let tz = probs[0].len();
    let mut total = 0.0;
    for i in 0..n {
        let mut p = 0.0;
        for z in 0..tz {
            let mass: f64 = (0..n).map(|j| probs[j][z]).sum();
            if mass == 0.0 {
                continue;
            }
            let joint: f64 = (0..n)
                .filter(|&j| labels[j] == labels[i])
                .map(|j| probs[j][z])
                .sum();
            p += joint / mass * probs[i][z];
        }
        total += p.ln();
    }
    total / n as f64
}

/// trace(inv(Σ_f + ridge I) Σ_b) with an explicit matrix inverse. `ridge`
/// of `None` uses 1e-8 · trace(Σ_f) / d.
pub fn hscore_dense(points: &Rows, labels: &[usize], ridge: Option<f64>) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut f = DMatrix::from_fn(n, d, |i, j| points[i][j]);
    let means: Vec<f64> = (0..d).map(|j| f.column(j).mean()).collect();
    for i in 0..n {
        for j in 0..d {
            f[(i, j)] -= means[j];
        }
    }
    let classes = labels.iter().max().unwrap() + 1;
    let mut g = DMatrix::zeros(n, d);
    for c in 0..classes {
        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        for j in 0..d {
            let mean = members.iter().map(|&i| f[(i, j)]).sum::<f64>() / members.len() as f64;
            for &i in &members {
                g[(i, j)] = mean;
            }
        }
    }
    let cov = f.transpose() * &f / n as f64;
    let ridge = ridge.unwrap_or(1e-8 * cov.trace() / d as f64);
    let cov_f = cov + DMatrix::identity(d, d) * ridge;
    let cov_b = g.transpose() * &g / n as f64;
    (cov_f.try_inverse().expect("invertible") * cov_b).trace()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub ties_a_only: u64,
    pub ties_b_only: u64,
    pub ties_both: u64,
}

pub fn pair_counts(a: &[f64], b: &[f64]) -> PairCounts {
    let mut c = PairCounts {
        concordant: 0,
        discordant: 0,
        ties_a_only: 0,
        ties_b_only: 0,
        ties_both: 0,
    };
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = a[i] - a[j];
            let db = b[i] - b[j];
            match (da == 0.0, db == 0.0) {
                (true, true) => c.ties_both += 1,
                (true, false) => c.ties_a_only += 1,
                (false, true) => c.ties_b_only += 1,
                _ if (da > 0.0) == (db > 0.0) => c.concordant += 1,
                _ => c.discordant += 1,
            }
        }
    }
    c
}

/// Tau-b from explicit pair enumeration; `None` when undefined.
pub fn kendall_tau_b_pairs(a: &[f64], b: &[f64]) -> Option<f64> {
    let c = pair_counts(a, b);
    let pq = (c.concordant + c.discordant) as f64;
    let left = pq + c.ties_a_only as f64;
    let right = pq + c.ties_b_only as f64;
    if left == 0.0 || right == 0.0 {
        return None;
    }
    Some((c.concordant as f64 - c.discordant as f64) / (left * right).sqrt())
}

/// Top-k hit by sorting: best score (ties to the smallest id), then compare
/// its accuracy with the k-th largest accuracy.
pub fn top_k_hit_sort(ids: &[String], oriented: &[f64], accuracies: &[f64], k: usize) -> bool {
    let mut by_score: Vec<usize> = (0..ids.len()).collect();
    by_score.sort_by(|&i, &j| {
        oriented[j]
            .partial_cmp(&oriented[i])
            .unwrap()
            .then(ids[i].cmp(&ids[j]))
    });
    let best = by_score[0];
    let mut acc = accuracies.to_vec();
    acc.sort_by(|x, y| y.partial_cmp(x).unwrap());
    accuracies[best] >= acc[k - 1]
}
