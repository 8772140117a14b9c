use hardy_core::sim::{cholesky_toeplitz, compare_report, simulate, toeplitz_cov, Method};
use hardy_core::spectral::default_chain;
use hardy_core::{build_chain, SimConfig, SpacingRule};

#[test]
fn covariance_is_positive_definite_without_jitter() {
    let ch = default_chain().unwrap();
    for n in [10usize, 100, 500, 2000] {
        let row = toeplitz_cov(&ch, n).unwrap();
        assert!(cholesky_toeplitz(&row, 0.0).is_ok(), "n = {n}");
    }
}

#[test]
fn law_of_short_vectors() {
    let ch = default_chain().unwrap();
    let reps = 100_000;
    let b = simulate(&ch, &SimConfig::new(4, reps, 17)).unwrap();
    let row = toeplitz_cov(&ch, 4).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let prods: Vec<f64> = b.samples.iter().map(|x| x[i] * x[j]).collect();
            let mean = prods.iter().sum::<f64>() / reps as f64;
            let var = prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
            let se = (var / reps as f64).sqrt();
            let target = row[i.abs_diff(j)];
            assert!((mean - target).abs() <= 5.0 * se, "({i},{j}) {mean} vs {target} se {se}");
        }
    }
}

#[test]
fn levinson_agrees_with_cholesky_at_500() {
    let ch = default_chain().unwrap();
    let a = simulate(&ch, &SimConfig::new(500, 3, 5)).unwrap();
    let mut c = SimConfig::new(500, 3, 5);
    c.method = Method::Levinson;
    let b = simulate(&ch, &c).unwrap();
    assert_eq!(b.factorization_note, "levinson");
    for (x, y) in a.samples.iter().zip(&b.samples) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() <= 1e-8, "{u} vs {v}");
        }
    }
}

#[test]
fn replicates_do_not_depend_on_batch_size() {
    let ch = default_chain().unwrap();
    let a = simulate(&ch, &SimConfig::new(50, 3, 8)).unwrap();
    let b = simulate(&ch, &SimConfig::new(50, 7, 8)).unwrap();
    assert_eq!(a.samples[..], b.samples[..3]);
}

#[test]
fn jitter_is_only_used_when_needed() {
    let ch = default_chain().unwrap();
    let mut c = SimConfig::new(30, 2, 1);
    c.jitter = 1e-9;
    let b = simulate(&ch, &c).unwrap();
    assert_eq!(b.factorization_note, "cholesky");
}

#[test]
fn white_noise_comparison_has_no_flags() {
    let ch = build_chain(&[], SpacingRule::Standard).unwrap();
    let b = simulate(&ch, &SimConfig::new(300, 200, 42)).unwrap();
    let r = compare_report(&ch, &b, 10).unwrap();
    assert!(r.flags.is_empty(), "{:?}", r.flags);
    assert_eq!(r.rows[3].theoretical, 0.0);
}
