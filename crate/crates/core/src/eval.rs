//! Agreement between transferability scores and fine-tuned accuracies.
//!
//! Correlation is Kendall's tau-b, so tied accuracies do not bias it toward
//! zero. Scores of lower-is-better methods are negated before any ranking.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AccuracyVector, FeatureMatrix, LabelVector};
use crate::scores::tmi;

pub const TAU_VARIANT: &str = "tau-b";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    /// Maps a raw score so that larger always means "predicted better".
    pub fn normalize(self, score: f64) -> f64 {
        match self {
            Orientation::HigherBetter => score,
            Orientation::LowerBetter => -score,
        }
    }
}

/// One method's scores over a set of candidate models.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodScores {
    pub method: String,
    pub model_ids: Vec<String>,
    pub scores: Vec<f64>,
    pub wall_times: Vec<f64>,
    pub orientation: Orientation,
}

impl MethodScores {
    pub fn new(
        method: impl Into<String>,
        model_ids: Vec<String>,
        scores: Vec<f64>,
        wall_times: Vec<f64>,
        orientation: Orientation,
    ) -> Result<Self> {
        let method = method.into();
        if model_ids.len() != scores.len() || model_ids.len() != wall_times.len() {
            return Err(Error::Validation(format!(
                "{method}: {} model ids, {} scores, {} wall times",
                model_ids.len(),
                scores.len(),
                wall_times.len()
            )));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::Validation(format!(
                "{method}: score for model {:?} is not finite",
                model_ids[i]
            )));
        }
        let unique: BTreeSet<&String> = model_ids.iter().collect();
        if unique.len() != model_ids.len() {
            return Err(Error::Validation(format!("{method}: duplicate model ids")));
        }
        Ok(Self {
            method,
            model_ids,
            scores,
            wall_times,
            orientation,
        })
    }

    fn oriented(&self) -> impl Iterator<Item = f64> + '_ {
        self.scores.iter().map(|&s| self.orientation.normalize(s))
    }

    /// Model with the best oriented score; ties go to the smallest id.
    pub fn best_model(&self) -> Option<&str> {
        self.model_ids
            .iter()
            .zip(self.oriented())
            .max_by(|(ia, sa), (ib, sb)| sa.total_cmp(sb).then_with(|| ib.cmp(ia)))
            .map(|(id, _)| id.as_str())
    }
}

/// Kendall's tau-b in O(M log M).
///
/// `(P − Q) / √((P + Q + T_a)(P + Q + T_b))` with `T_a`, `T_b` the pairs
/// tied only in `a` or only in `b`.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "kendall_tau: lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Validation(
            "kendall_tau needs at least 2 values".into(),
        ));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "kendall_tau inputs must be finite".into(),
        ));
    }
    let m = a.len() as i64;
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])));

    let tied_pairs = |run: i64| run * (run - 1) / 2;
    let mut ties_a = 0i64;
    let mut ties_joint = 0i64;
    let (mut run_a, mut run_joint) = (1i64, 1i64);
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        if a[i] == a[j] {
            run_a += 1;
            if b[i] == b[j] {
                run_joint += 1;
            } else {
                ties_joint += tied_pairs(run_joint);
                run_joint = 1;
            }
        } else {
            ties_a += tied_pairs(run_a);
            ties_joint += tied_pairs(run_joint);
            run_a = 1;
            run_joint = 1;
        }
    }
    ties_a += tied_pairs(run_a);
    ties_joint += tied_pairs(run_joint);

    let mut seq: Vec<f64> = order.iter().map(|&i| b[i]).collect();
    let discordant = count_inversions(&mut seq);

    let mut ties_b = 0i64;
    let mut run_b = 1i64;
    for w in seq.windows(2) {
        if w[0] == w[1] {
            run_b += 1;
        } else {
            ties_b += tied_pairs(run_b);
            run_b = 1;
        }
    }
    ties_b += tied_pairs(run_b);

    let total = tied_pairs(m);
    if ties_a == total {
        return Err(Error::UndefinedCorrelation("a"));
    }
    if ties_b == total {
        return Err(Error::UndefinedCorrelation("b"));
    }
    let numerator = total - ties_a - ties_b + ties_joint - 2 * discordant;
    let tau = numerator as f64 / (((total - ties_a) as f64) * ((total - ties_b) as f64)).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}

/// Sorts `seq` ascending and returns the number of strict inversions.
fn count_inversions(seq: &mut [f64]) -> i64 {
    let mut buf = seq.to_vec();
    sort_count(seq, &mut buf)
}

fn sort_count(seq: &mut [f64], buf: &mut [f64]) -> i64 {
    let len = seq.len();
    if len < 2 {
        return 0;
    }
    let mid = len / 2;
    let mut count = sort_count(&mut seq[..mid], &mut buf[..mid]);
    count += sort_count(&mut seq[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < len {
        if seq[j] < seq[i] {
            buf[k] = seq[j];
            count += (mid - i) as i64;
            j += 1;
        } else {
            buf[k] = seq[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..k + len - j].copy_from_slice(&seq[j..len]);
    seq.copy_from_slice(&buf[..len]);
    count
}

/// Accuracies reordered to match `scores.model_ids`.
fn join_accuracies(scores: &MethodScores, accuracies: &AccuracyVector) -> Result<Vec<f64>> {
    let score_ids: BTreeSet<&str> = scores.model_ids.iter().map(String::as_str).collect();
    let acc_ids: BTreeSet<&str> = accuracies.model_ids().iter().map(String::as_str).collect();
    let unmatched: Vec<String> = score_ids
        .symmetric_difference(&acc_ids)
        .map(|s| s.to_string())
        .collect();
    if !unmatched.is_empty() {
        return Err(Error::IdMismatch(unmatched));
    }
    Ok(scores
        .model_ids
        .iter()
        .map(|id| accuracies.get(id).expect("ids matched above"))
        .collect())
}

/// Whether the best-scored model is among the `k` most accurate models.
/// Accuracy ties at the boundary widen the top-k set.
pub fn top_k_hit(scores: &MethodScores, accuracies: &AccuracyVector, k: usize) -> Result<bool> {
    let acc = join_accuracies(scores, accuracies)?;
    let m = acc.len();
    if k == 0 || k > m {
        return Err(Error::Validation(format!(
            "top-k needs 1 <= k <= {m} models, got k = {k}"
        )));
    }
    let mut sorted = acc.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let threshold = sorted[k - 1];
    let best = scores.best_model().expect("k >= 1 implies a model");
    let best_idx = scores
        .model_ids
        .iter()
        .position(|id| id == best)
        .expect("best model comes from model_ids");
    Ok(acc[best_idx] >= threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRow {
    pub method: String,
    pub orientation: Orientation,
    /// Raw scores keyed by model id.
    pub scores: BTreeMap<String, f64>,
    /// Scores after orientation normalization (higher is better).
    pub oriented_scores: BTreeMap<String, f64>,
    pub best_model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kendall_tau: Option<f64>,
    /// Keyed by k.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k_hit: Option<BTreeMap<String, bool>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodTiming {
    pub total_s: f64,
    pub per_model_s: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub tau_variant: String,
    pub orientation_note: String,
    pub models: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    pub metadata: ReportMetadata,
    /// Sorted by method name.
    pub methods: Vec<MethodRow>,
    /// Wall-clock data only; everything outside this key is deterministic.
    pub timing: BTreeMap<String, MethodTiming>,
}

/// Builds one row per method. Without accuracies only the score table and
/// timing are filled.
pub fn build_report(
    all_methods: &[MethodScores],
    accuracies: Option<&AccuracyVector>,
    ks: &[usize],
) -> Result<RankingReport> {
    let first = all_methods
        .first()
        .ok_or_else(|| Error::Validation("report needs at least one method".into()))?;
    let ids: BTreeSet<&String> = first.model_ids.iter().collect();
    for m in all_methods {
        let other: BTreeSet<&String> = m.model_ids.iter().collect();
        if other != ids {
            let unmatched = ids
                .symmetric_difference(&other)
                .map(|s| s.to_string())
                .collect();
            return Err(Error::IdMismatch(unmatched));
        }
    }
    let mut names = BTreeSet::new();
    for m in all_methods {
        if !names.insert(m.method.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate method {:?}",
                m.method
            )));
        }
    }

    let mut rows = Vec::with_capacity(all_methods.len());
    let mut timing = BTreeMap::new();
    let mut sorted: Vec<&MethodScores> = all_methods.iter().collect();
    sorted.sort_by(|a, b| a.method.cmp(&b.method));
    for m in sorted {
        let mut warnings = Vec::new();
        let (kendall, hits) = match accuracies {
            Some(acc) => {
                let joined = join_accuracies(m, acc)?;
                let oriented: Vec<f64> = m.oriented().collect();
                let tau = match kendall_tau(&oriented, &joined) {
                    Ok(t) => Some(t),
                    Err(e @ Error::UndefinedCorrelation(_)) => {
                        warnings.push(format!("kendall_tau omitted: {e}"));
                        None
                    }
                    Err(e) => return Err(e),
                };
                let mut hits = BTreeMap::new();
                for &k in ks {
                    hits.insert(k.to_string(), top_k_hit(m, acc, k)?);
                }
                (tau, Some(hits))
            }
            None => (None, None),
        };
        rows.push(MethodRow {
            method: m.method.clone(),
            orientation: m.orientation,
            scores: m
                .model_ids
                .iter()
                .cloned()
                .zip(m.scores.iter().copied())
                .collect(),
            oriented_scores: m.model_ids.iter().cloned().zip(m.oriented()).collect(),
            best_model: m.best_model().unwrap_or_default().to_string(),
            kendall_tau: kendall,
            top_k_hit: hits,
            warnings,
        });
        timing.insert(
            m.method.clone(),
            MethodTiming {
                total_s: m.wall_times.iter().sum(),
                per_model_s: m
                    .model_ids
                    .iter()
                    .cloned()
                    .zip(m.wall_times.iter().copied())
                    .collect(),
            },
        );
    }
    Ok(RankingReport {
        metadata: ReportMetadata {
            tau_variant: TAU_VARIANT.into(),
            orientation_note: "lower_better methods are negated before correlation and top-k \
                               selection; icv_* compactness measures are lower_better"
                .into(),
            models: ids.into_iter().cloned().collect(),
        },
        methods: rows,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Set when this k could not be scored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// TMI for each neighbor count, ordered by k. A k that cannot be scored is
/// reported in its entry rather than failing the sweep.
pub fn sensitivity_sweep(
    features: &FeatureMatrix,
    labels: &LabelVector,
    ks: &[usize],
) -> Vec<SweepEntry> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| match tmi(features, labels, k) {
            Ok(r) => SweepEntry {
                k,
                value: Some(r.value),
                warnings: r.warnings,
                error: None,
            },
            Err(e) => SweepEntry {
                k,
                value: None,
                warnings: Vec::new(),
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(m: usize) -> Vec<String> {
        (0..m).map(|i| format!("m{i:02}")).collect()
    }

    fn method(name: &str, scores: &[f64], o: Orientation) -> MethodScores {
        MethodScores::new(
            name,
            ids(scores.len()),
            scores.to_vec(),
            vec![0.0; scores.len()],
            o,
        )
        .unwrap()
    }

    fn acc(values: &[f64]) -> AccuracyVector {
        AccuracyVector::new(ids(values.len()), values.to_vec()).unwrap()
    }

    #[test]
    fn tau_basic() {
        assert_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(),
            1.0
        );
        assert_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            -1.0
        );
    }

    #[test]
    fn tau_four_point_example() {
        // Pairs: (0,1) C, (0,2) C, (0,3) C, (1,2) C, (1,3) C, (2,3) D -> (5-1)/6
        let t = kendall_tau(&[0.1, 0.4, 0.3, 0.2], &[0.5, 0.9, 0.6, 0.8]).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15, "{t}");
    }

    #[test]
    fn tau_all_tied_is_error() {
        assert!(matches!(
            kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation("a"))
        ));
        assert!(matches!(
            kendall_tau(&[1.0, 2.0], &[5.0, 5.0]),
            Err(Error::UndefinedCorrelation("b"))
        ));
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn top_k_basic() {
        let s = method("x", &[0.9, 0.1, 0.2], Orientation::HigherBetter);
        assert!(top_k_hit(&s, &acc(&[0.8, 0.5, 0.6]), 1).unwrap());
        let worst: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let s = method("x", &worst, Orientation::HigherBetter);
        let a: Vec<f64> = (0..10).map(|i| 1.0 - i as f64 / 10.0).collect();
        assert!(!top_k_hit(&s, &acc(&a), 5).unwrap());
        assert!(top_k_hit(&s, &acc(&a), 10).unwrap());
    }

    #[test]
    fn top_k_ties_widen_and_score_ties_pick_lowest_id() {
        // m00 and m01 tie on score; m00 wins. m00 ties m02 for 2nd accuracy.
        let s = method("x", &[5.0, 5.0, 1.0], Orientation::HigherBetter);
        let a = acc(&[0.5, 0.9, 0.5]);
        assert_eq!(s.best_model(), Some("m00"));
        assert!(!top_k_hit(&s, &a, 1).unwrap());
        assert!(top_k_hit(&s, &a, 2).unwrap());
    }

    #[test]
    fn top_k_id_mismatch_lists_ids() {
        let s = method("x", &[1.0, 2.0], Orientation::HigherBetter);
        let a = AccuracyVector::new(vec!["m00".into(), "zz".into()], vec![0.1, 0.2]).unwrap();
        let err = top_k_hit(&s, &a, 1).unwrap_err();
        assert!(
            err.to_string().contains("m01") && err.to_string().contains("zz"),
            "{err}"
        );
    }

    #[test]
    fn report_orientation_symmetry() {
        let a = acc(&[0.1, 0.5, 0.3, 0.9]);
        let up = method("a_up", &[1.0, 3.0, 2.0, 4.0], Orientation::HigherBetter);
        let down = method(
            "b_down",
            &[-1.0, -3.0, -2.0, -4.0],
            Orientation::LowerBetter,
        );
        let r = build_report(&[down, up], Some(&a), &[1, 2]).unwrap();
        assert_eq!(r.methods[0].method, "a_up");
        let (x, y) = (&r.methods[0], &r.methods[1]);
        assert_eq!(x.kendall_tau, Some(1.0));
        assert_eq!(x.kendall_tau, y.kendall_tau);
        assert_eq!(x.top_k_hit, y.top_k_hit);
        assert_eq!(x.oriented_scores, y.oriented_scores);
        assert_eq!(x.best_model, y.best_model);
    }

    #[test]
    fn report_without_accuracies() {
        let r = build_report(
            &[method("t", &[1.0, 2.0], Orientation::HigherBetter)],
            None,
            &[1],
        )
        .unwrap();
        assert!(r.methods[0].kendall_tau.is_none());
        assert!(r.methods[0].top_k_hit.is_none());
    }

    #[test]
    fn report_rejects_inconsistent_ids() {
        let a = method("a", &[1.0, 2.0], Orientation::HigherBetter);
        let b = MethodScores::new(
            "b",
            vec!["m00".into(), "other".into()],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            Orientation::HigherBetter,
        )
        .unwrap();
        assert!(matches!(
            build_report(&[a, b], None, &[]),
            Err(Error::IdMismatch(_))
        ));
    }
}
