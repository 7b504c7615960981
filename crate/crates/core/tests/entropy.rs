use proptest::prelude::*;
use tmi_core::entropy::{knn_entropy, kth_neighbor_distances, NeighborBackend};
use tmi_core::ingest::FeatureMatrix;
use tmi_oracles as oracle;

const BACKENDS: [NeighborBackend; 2] = [NeighborBackend::BruteForce, NeighborBackend::Tree];

fn matrix(rows: &oracle::Rows) -> FeatureMatrix {
    FeatureMatrix::from_rows(rows).unwrap()
}

#[test]
fn tree_equals_brute_force_and_sorted_oracle() {
    let mut rng = oracle::rng(200);
    let rows = oracle::normal_rows(&mut rng, 200, 3, 1.0);
    let x = matrix(&rows);
    let want = oracle::kth_distances_sorted(&rows, 5);
    for backend in BACKENDS {
        assert_eq!(
            kth_neighbor_distances(&x, 5, backend).unwrap(),
            want,
            "{backend:?}"
        );
    }
}

/// Points `A z` with `z` standard normal, `A` lower triangular.
fn correlated_gaussian(seed: u64, n: usize, a: &[Vec<f64>]) -> (FeatureMatrix, f64) {
    let d = a.len();
    let mut rng = oracle::rng(seed);
    let z = oracle::normal_rows(&mut rng, n, d, 1.0);
    let rows: oracle::Rows = z
        .iter()
        .map(|zi| {
            (0..d)
                .map(|r| (0..=r).map(|c| a[r][c] * zi[c]).sum())
                .collect()
        })
        .collect();
    let log_det: f64 = (0..d).map(|i| 2.0 * a[i][i].abs().ln()).sum();
    (matrix(&rows), log_det)
}

#[test]
fn consistent_for_gaussians_in_1_2_4_dims() {
    let factors: [Vec<Vec<f64>>; 3] = [
        vec![vec![1.0]],
        vec![vec![2.0, 0.0], vec![0.6, 0.5]],
        vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.3, 1.5, 0.0, 0.0],
            vec![-0.2, 0.4, 0.7, 0.0],
            vec![0.1, 0.0, 0.5, 1.2],
        ],
    ];
    for (i, a) in factors.iter().enumerate() {
        let (x, log_det) = correlated_gaussian(40 + i as u64, 20_000, a);
        let truth = oracle::gaussian_entropy(a.len(), log_det);
        let est = knn_entropy(&x, 3, NeighborBackend::Tree).unwrap().value;
        assert!(
            (est - truth).abs() <= 0.05,
            "d={}: {est} vs {truth}",
            a.len()
        );
    }
}

#[test]
fn scaling_law_holds_to_1e9() {
    let mut rng = oracle::rng(9);
    let x = matrix(&oracle::normal_rows(&mut rng, 500, 3, 1.0));
    let base = knn_entropy(&x, 3, NeighborBackend::Tree).unwrap().value;
    for a in [0.5, std::f64::consts::E, 10.0] {
        let scaled = knn_entropy(&x.map(|v| a * v).unwrap(), 3, NeighborBackend::Tree).unwrap();
        assert_eq!(scaled.num_clamped, 0);
        assert!((scaled.value - base - 3.0 * a.ln()).abs() < 1e-9, "a={a}");
    }
}

/// Random points on a 2^-20 grid; adding integers to them is exact.
fn dyadic_points(seed: u64, n: usize, d: usize) -> FeatureMatrix {
    let mut rng = oracle::rng(seed);
    let rows: oracle::Rows = oracle::uniform_rows(&mut rng, n, d)
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| (v * 1048576.0).floor() / 1048576.0)
                .collect()
        })
        .collect();
    matrix(&rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn translation_is_bit_exact(seed in 0u64..1000, shift in prop::collection::vec(-512i32..512, 3)) {
        let x = dyadic_points(seed, 60, 3);
        let offset: Vec<f64> = shift.iter().map(|&s| s as f64).collect();
        let moved = x.translate(&offset).unwrap();
        for backend in BACKENDS {
            let a = knn_entropy(&x, 2, backend).unwrap();
            let b = knn_entropy(&moved, 2, backend).unwrap();
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn permutation_invariant(seed in 0u64..1000) {
        let mut rng = oracle::rng(seed);
        let rows = oracle::normal_rows(&mut rng, 40, 2, 1.0);
        let mut shuffled = rows.clone();
        shuffled.reverse();
        shuffled.rotate_left((seed % 40) as usize);
        let a = knn_entropy(&matrix(&rows), 3, NeighborBackend::Tree).unwrap().value;
        let b = knn_entropy(&matrix(&shuffled), 3, NeighborBackend::Tree).unwrap().value;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn backends_agree_exactly(seed in 0u64..10_000, n in 2usize..120, d in 1usize..5, k in 1usize..6) {
        prop_assume!(n > k);
        let mut rng = oracle::rng(seed);
        // Coarse rounding forces plenty of ties and duplicates.
        let rows: oracle::Rows = oracle::normal_rows(&mut rng, n, d, 3.0)
            .into_iter()
            .map(|r| r.into_iter().map(f64::round).collect())
            .collect();
        let x = matrix(&rows);
        prop_assert_eq!(
            kth_neighbor_distances(&x, k, NeighborBackend::Tree).unwrap(),
            kth_neighbor_distances(&x, k, NeighborBackend::BruteForce).unwrap()
        );
    }
}
