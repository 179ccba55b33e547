use selfloc::analysis::{all_rows_prob, any_column_fail_prob, monte_carlo_success_rate, Simulator};

#[test]
fn success_rate_clears_the_sufficient_bound() {
    let trials = 100_000;
    let r = monte_carlo_success_rate(8, 8, 0.99, trials, 7).unwrap();
    let bound = all_rows_prob(8, 8, 0.99) * (1.0 - any_column_fail_prob(8, 8, 0.99));
    assert!((all_rows_prob(8, 8, 0.99) - 0.979).abs() < 5e-4);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    assert!(
        r.success_rate >= bound - 3.0 * sigma,
        "{} < {bound}",
        r.success_rate
    );
    assert!(r.ci_low <= r.success_rate && r.success_rate <= r.ci_high);
}

#[test]
fn perfect_readings_always_decode() {
    let r = monte_carlo_success_rate(8, 8, 1.0, 1_000, 1).unwrap();
    assert_eq!(r.successes, 1_000);
    assert_eq!(r.success_rate, 1.0);
}

#[test]
fn parallel_runs_are_reproducible() {
    let sim = Simulator::new(6, 10).unwrap();
    let a = sim.success_rate(0.9, 5_000, 42).unwrap();
    let b = sim.success_rate(0.9, 5_000, 42).unwrap();
    let c = sim.success_rate(0.9, 5_000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.successes, c.successes);
}
