use renyi_combining::harness::scatter::write_scatter;
use renyi_combining::harness::{channel_at, run_scatter, ExperimentConfig, SEED_ENV};
use renyi_combining::quantum::QEntropyKind;

#[test]
fn hilbert_schmidt_purity_average() {
    // E Tr σ² = (d + k)/(dk + 1) for GG†/Tr with G a d×k Ginibre matrix; d = k = 2 gives 0.8
    let n = 10_000;
    let mean: f64 = (0..n)
        .map(|i| {
            let w = channel_at(42, i, 2);
            w.sigma(0).trace_product(w.sigma(0))
        })
        .sum::<f64>()
        / n as f64;
    assert!((mean - 0.8).abs() < 0.01, "mean purity {mean}");
}

#[test]
fn scatter_bytes_are_reproducible() {
    let cfg = ExperimentConfig {
        samples: 40,
        dim: 3,
        alphas: vec![0.5, 3.0],
        entropy_kinds: vec![QEntropyKind::TildeDown, QEntropyKind::BarDown],
        ..Default::default()
    };
    let render = |c: &ExperimentConfig| {
        let mut buf = Vec::new();
        write_scatter(&mut buf, &run_scatter(c).unwrap().records).unwrap();
        buf
    };
    let first = render(&cfg);
    assert_eq!(first, render(&cfg));
    let other = ExperimentConfig {
        seed: 43,
        ..cfg.clone()
    };
    assert_ne!(first, render(&other));
}

#[test]
fn tilde_down_scatter_in_three_dimensions_respects_the_bounds() {
    let cfg = ExperimentConfig {
        samples: 100,
        dim: 3,
        ..Default::default()
    };
    let out = run_scatter(&cfg).unwrap();
    assert_eq!(out.total_violations(QEntropyKind::TildeDown), 0);
    assert!(out.groups.iter().all(|g| g.symmetry_failures == 0));
}

#[test]
fn seed_override_parses_the_environment_format() {
    let cfg = ExperimentConfig::default()
        .with_seed_override(Some(" 17 "))
        .unwrap();
    assert_eq!(cfg.seed, 17);
    assert_eq!(SEED_ENV, "RENYI_SEED");
}
