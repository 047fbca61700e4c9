use dotforge_cubature::{integrate, Estimate, Options};

#[test]
fn weights_integrate_constants_exactly() {
    for dim in 2..=6 {
        let est = integrate(|_| 1.0, &vec![0.0; dim], &vec![2.0; dim], &Options::default());
        let exact = 2f64.powi(dim as i32);
        assert!((est.value - exact).abs() < 1e-12 * exact, "dim {dim}: {}", est.value);
    }
}

#[test]
fn exact_for_degree_seven_monomials() {
    let f = |x: &[f64]| x[0].powi(4) * x[1].powi(2) * x[2] + x[0].powi(6) * x[1];
    // [0,1]^3: 1/5*1/3*1/2 + 1/7*1/2
    let exact = 1.0 / 30.0 + 1.0 / 14.0;
    let est = integrate(f, &[0.0; 3], &[1.0; 3], &Options::with_rel_tol(1e-13));
    assert!((est.value - exact).abs() < 1e-13, "{}", est.value);
}

#[test]
fn gaussian_calibration() {
    let f = |x: &[f64]| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + 0.5 * x[2] * x[2])).exp();
    let exact = std::f64::consts::PI.powf(1.5) / (2.0f64 * 0.5).sqrt();
    for tol in [1e-3, 1e-5, 1e-7] {
        let est = integrate(f, &[-12.0; 3], &[12.0; 3], &Options::with_rel_tol(tol));
        assert!(est.converged);
        assert!(((est.value - exact) / exact).abs() < tol, "tol {tol}: {}", est.value);
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let f = |x: &[f64]| 1.0 / (1e-2 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| integrate(f, &[0.0; 3], &[1.0; 3], &Options::with_rel_tol(1e-7)))
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.evals, b.evals);
}

#[test]
fn reports_non_convergence() {
    let f = |x: &[f64]| (1.0 / (x[0] + 1e-9)).sqrt() * (100.0 * x[1]).sin();
    let opts = Options {
        rel_tol: 1e-12,
        max_evals: 20_000,
        ..Options::default()
    };
    let est = integrate(f, &[0.0; 2], &[1.0; 2], &opts);
    assert!(!est.converged);
    assert!(est.evals <= 20_000);
    assert!(est.error > 0.0);
}

#[test]
fn halving_tolerance_stays_within_reported_error() {
    let f = |x: &[f64]| (x[0] * x[1] * 3.0).cos() / (0.1 + x[2]);
    let mut prev: Option<Estimate> = None;
    for tol in [1e-3, 5e-4, 2.5e-4, 1.25e-4] {
        let est = integrate(f, &[0.0; 3], &[1.0; 3], &Options::with_rel_tol(tol));
        if let Some(p) = prev {
            assert!((est.value - p.value).abs() <= p.error.max(1e-15));
        }
        prev = Some(est);
    }
}
