use tmi_core::baselines::{hscore, leep, logme, logme_fits, nce, transrate, BaselineConfig};
use tmi_core::ingest::{FeatureMatrix, LabelVector, SourcePredictionMatrix};
use tmi_oracles as oracle;

fn preds(rows: &oracle::Rows) -> SourcePredictionMatrix {
    SourcePredictionMatrix::new(FeatureMatrix::from_rows(rows).unwrap()).unwrap()
}

fn labels(y: &[usize]) -> LabelVector {
    LabelVector::new(y.to_vec(), None).unwrap()
}

fn features(rows: &oracle::Rows) -> FeatureMatrix {
    FeatureMatrix::from_rows(rows).unwrap()
}

#[test]
fn nce_and_leep_match_enumeration() {
    let mut rng = oracle::rng(1);
    let probs = oracle::random_stochastic(&mut rng, 20, 3);
    let mut y = oracle::random_labels(&mut rng, 20, 2);
    y[0] = 1;
    let (p, l) = (preds(&probs), labels(&y));
    let got = nce(&p, &l).unwrap().value;
    assert!((got - oracle::nce_enumeration(&probs, &y)).abs() < 1e-12);
    assert!(got <= 0.0);
    let got = leep(&p, &l).unwrap().value;
    assert!((got - oracle::leep_direct(&probs, &y)).abs() < 1e-12);
    assert!(got <= 0.0);
}

#[test]
fn nce_invariant_to_source_relabeling() {
    let mut rng = oracle::rng(2);
    let probs = oracle::random_stochastic(&mut rng, 30, 4);
    let y = oracle::random_labels(&mut rng, 30, 3);
    let permuted: oracle::Rows = probs.iter().map(|r| vec![r[2], r[0], r[3], r[1]]).collect();
    let a = nce(&preds(&probs), &labels(&y)).unwrap().value;
    let b = nce(&preds(&permuted), &labels(&y)).unwrap().value;
    assert!((a - b).abs() < 1e-15);
}

#[test]
fn hscore_matches_dense_inverse() {
    let mut rng = oracle::rng(3);
    let rows = oracle::normal_rows(&mut rng, 100, 4, 1.0);
    let mut y = oracle::random_labels(&mut rng, 100, 3);
    y[0] = 2;
    let got = hscore(&features(&rows), &labels(&y), &BaselineConfig::default())
        .unwrap()
        .value;
    let want = oracle::hscore_dense(&rows, &y, None);
    assert!((got - want).abs() <= 1e-8 * want.abs(), "{got} vs {want}");
    assert!(got >= 0.0);
}

#[test]
fn hscore_on_class_means_is_rank_of_mean_set() {
    // Three classes in d = 2 with non-collinear means: rank 2.
    let means = [[0.0, 0.0], [3.0, 1.0], [-1.0, 4.0]];
    let y: Vec<usize> = (0..30).map(|i| i % 3).collect();
    let rows: oracle::Rows = y.iter().map(|&c| means[c].to_vec()).collect();
    let config = BaselineConfig {
        hscore_ridge: Some(1e-12),
        ..BaselineConfig::default()
    };
    let got = hscore(&features(&rows), &labels(&y), &config)
        .unwrap()
        .value;
    let dense = oracle::hscore_dense(&rows, &y, Some(1e-12));
    assert!((got - 2.0).abs() < 1e-9, "{got}");
    assert!((got - dense).abs() < 1e-9);
}

fn one_hot_features(n: usize, classes: usize) -> (FeatureMatrix, LabelVector) {
    let y: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let rows: oracle::Rows = y
        .iter()
        .map(|&c| {
            (0..classes)
                .map(|j| if j == c { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    (features(&rows), labels(&y))
}

#[test]
fn logme_evidence_never_decreases() {
    let config = BaselineConfig::default();
    for seed in 0..40u64 {
        let mut rng = oracle::rng(seed);
        let n = 20 + (seed as usize * 7) % 200;
        let d = 1 + (seed as usize) % 9;
        let scale = 10f64.powi((seed % 7) as i32 - 3);
        let rows = oracle::normal_rows(&mut rng, n, d, scale);
        let y = oracle::random_labels(&mut rng, n, 3);
        for fit in logme_fits(&features(&rows), &labels(&y), &config).unwrap() {
            for w in fit.trace.windows(2) {
                assert!(
                    w[1] >= w[0],
                    "seed {seed} class {}: {:?}",
                    fit.class_id,
                    fit.trace
                );
            }
        }
    }
    let (x, y) = one_hot_features(200, 4);
    for fit in logme_fits(&x, &y, &config).unwrap() {
        assert!(fit.trace.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn logme_prefers_predictive_features() {
    let config = BaselineConfig::default();
    let (x, y) = one_hot_features(200, 4);
    let good = logme(&x, &y, &config).unwrap().value;
    for seed in 0..5 {
        let mut rng = oracle::rng(seed);
        let noise = features(&oracle::normal_rows(&mut rng, 200, 4, 1.0));
        let bad = logme(&noise, &y, &config).unwrap().value;
        assert!(good > bad, "seed {seed}: {good} <= {bad}");
    }
}

#[test]
fn logme_is_deterministic() {
    let mut rng = oracle::rng(12);
    let rows = oracle::normal_rows(&mut rng, 80, 5, 1.0);
    let y = oracle::random_labels(&mut rng, 80, 3);
    let config = BaselineConfig::default();
    let a = logme(&features(&rows), &labels(&y), &config).unwrap().value;
    let b = logme(&features(&rows), &labels(&y), &config).unwrap().value;
    assert_eq!(a.to_bits(), b.to_bits());
}

/// Duplicating every sample does not leave evidence/n exactly unchanged: the
/// Occam terms scale like ln(n)/n. The shift must shrink as n grows.
#[test]
fn logme_duplication_shift_vanishes_with_n() {
    let config = BaselineConfig::default();
    let mut shifts = Vec::new();
    for n in [200usize, 400, 800, 1600] {
        let mut rng = oracle::rng(5);
        let rows = oracle::normal_rows(&mut rng, n, 4, 1.0);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let rows: oracle::Rows = rows
            .iter()
            .zip(&y)
            .map(|(r, &c)| r.iter().map(|v| v + c as f64).collect())
            .collect();
        let doubled: oracle::Rows = rows.iter().chain(&rows).cloned().collect();
        let y2: Vec<usize> = y.iter().chain(&y).copied().collect();
        let a = logme(&features(&rows), &labels(&y), &config).unwrap().value;
        let b = logme(&features(&doubled), &labels(&y2), &config)
            .unwrap()
            .value;
        let shift = (a - b).abs();
        shifts.push(shift);
    }
    for w in shifts.windows(2) {
        assert!(w[1] < 0.75 * w[0], "{shifts:?}");
    }
    assert!(shifts[0] < 0.02 && shifts[3] < 0.003, "{shifts:?}");
}

#[test]
fn transrate_single_class_zero_and_translation_invariant() {
    let mut rng = oracle::rng(6);
    let rows = oracle::normal_rows(&mut rng, 300, 4, 1.0);
    let config = BaselineConfig::default();
    let x = features(&rows);
    assert_eq!(
        transrate(&x, &labels(&vec![0; 300]), &config)
            .unwrap()
            .value,
        0.0
    );
    let y = oracle::random_labels(&mut rng, 300, 3);
    let a = transrate(&x, &labels(&y), &config).unwrap().value;
    let b = transrate(
        &x.translate(&[100.0, -50.0, 3.0, 7.0]).unwrap(),
        &labels(&y),
        &config,
    )
    .unwrap()
    .value;
    assert!((a - b).abs() < 1e-6 * a.abs().max(1.0), "{a} vs {b}");
}

#[test]
fn transrate_separated_unbalanced_two_classes_positive() {
    let mut rng = oracle::rng(7);
    let noise = oracle::normal_rows(&mut rng, 200, 4, 1e-6);
    let y: Vec<usize> = (0..200).map(|i| usize::from(i % 4 == 0)).collect();
    let rows: oracle::Rows = noise
        .iter()
        .zip(&y)
        .map(|(r, &c)| r.iter().map(|v| v + 5.0 * c as f64).collect())
        .collect();
    let v = transrate(&features(&rows), &labels(&y), &BaselineConfig::default())
        .unwrap()
        .value;
    assert!(v > 0.0, "{v}");
}
