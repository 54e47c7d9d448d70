use csn_core::dimred::{
    joint_probabilities, kl_divergence, kl_gradient, pca, perplexity_calibration,
    q_distribution, tsne, EmbeddingMatrix, TsneParams,
};
use csn_testkit::eigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| [0; 3].map(|_| rng.random_range(-5.0..5.0)))
        .collect()
}

#[test]
fn pca_matches_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let rows = random_rows(&mut rng, 6);
        let x = EmbeddingMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
        let fit = pca(&x, 3).unwrap();
        let cov = eigen::covariance(&rows);
        let expected = eigen::eigenvalues(&cov);
        for c in 0..3 {
            assert!((fit.explained_variance[c] - expected[c]).abs() < 1e-8);
            let v = eigen::eigenvector(&cov, expected[c]);
            for (a, b) in fit.components[c].iter().zip(v) {
                assert!((a - b).abs() < 1e-8, "component {c}: {:?} vs {v:?}", fit.components[c]);
            }
        }
        let total: f64 = (0..3).map(|j| cov[j][j]).sum();
        assert!((fit.explained_variance.iter().sum::<f64>() - total).abs() < 1e-6);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let x = EmbeddingMatrix::from_rows(&rows).unwrap();
    let (p, _) = joint_probabilities(&x, 3.0).unwrap();
    let y: Vec<[f64; 2]> = (0..10)
        .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
        .collect();
    let g = kl_gradient(&p, &y, 1.0);
    let h = 1e-5;
    for i in 0..10 {
        for c in 0..2 {
            let mut plus = y.clone();
            plus[i][c] += h;
            let mut minus = y.clone();
            minus[i][c] -= h;
            let fd = (kl_divergence(&p, &plus) - kl_divergence(&p, &minus)) / (2.0 * h);
            let rel = (g[i][c] - fd).abs() / g[i][c].abs().max(fd.abs()).max(1e-12);
            assert!(rel < 1e-4, "({i},{c}): analytic {} fd {fd}", g[i][c]);
        }
    }
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    assert!((q_distribution(&y).iter().sum::<f64>() - 1.0).abs() < 1e-8);
}

#[test]
fn tsne_separates_distant_clusters() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let rows: Vec<Vec<f64>> = (0..20)
        .map(|i| {
            let offset = if i < 10 { 0.0 } else { 100.0 };
            (0..4).map(|_| offset + noise.sample(&mut rng)).collect()
        })
        .collect();
    let x = EmbeddingMatrix::from_rows(&rows).unwrap();
    let params = TsneParams {
        perplexity: 5.0,
        seed: 3,
        ..TsneParams::default()
    };
    let r = tsne(&x, &params).unwrap();
    assert!(r.final_kl < r.initial_kl);
    assert!(r.p_sum_error < 1e-8 && r.max_q_sum_error < 1e-8);
    let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut intra: f64 = 0.0;
    let mut inter = f64::INFINITY;
    for i in 0..20 {
        for j in i + 1..20 {
            let dist = d(r.coords[i], r.coords[j]);
            if (i < 10) == (j < 10) {
                intra = intra.max(dist);
            } else {
                inter = inter.min(dist);
            }
        }
    }
    assert!(intra < inter, "intra {intra} inter {inter}");
    assert_eq!(tsne(&x, &params).unwrap(), r);
}

#[test]
fn calibration_hits_random_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let n = rng.random_range(10..60);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..50.0f64).powi(2)).collect();
        let target = rng.random_range(2.0..(n as f64 * 0.8));
        let cal = perplexity_calibration(&d, target).unwrap();
        assert!(!cal.clamped);
        // Entropy in bits from the definition.
        let w: Vec<f64> = d.iter().map(|&v| (-v / (2.0 * cal.sigma * cal.sigma)).exp()).collect();
        let z: f64 = w.iter().sum();
        let h: f64 = w.iter().map(|&v| v / z).filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum();
        assert!((h.exp2() - target).abs() < 1e-4, "target {target}, got {}", h.exp2());
    }
}
