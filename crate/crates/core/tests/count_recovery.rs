mod common;

use multiclosure::countmodel::{self, dyad_log_pmf};
use multiclosure::mle::OptimOptions;

#[test]
fn recovers_planted_coefficients() {
    let truth = [0.2, -1.0, 0.5];
    let mut inside = 0;
    let runs = 10;
    for seed in 0..runs {
        let (net, cov) = common::simulate_count_network(40, (truth[0], truth[1], truth[2]), 1000 + seed);
        let fit = countmodel::fit(&net, &[("x".into(), cov)], true, OptimOptions::default()).unwrap();
        let names: Vec<&str> = fit.coefficients.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["sum", "nonzero", "x"]);
        let covered = fit
            .coefficients
            .iter()
            .zip(truth)
            .all(|(c, t)| (c.estimate - t).abs() <= 2.0 * c.std_err);
        inside += usize::from(covered);
        assert!(fit.aic < fit.null_aic);
    }
    // joint 2-SE coverage is about 0.95^3 per run
    assert!(inside >= 6, "{inside} of {runs} runs covered the truth");
}

#[test]
fn pmf_normalizes_across_regimes() {
    for (lambda, nz) in [(0.05, 0.0), (1.0, -2.0), (3.5, 1.5), (20.0, -0.3)] {
        let upper = (lambda * 4.0 + 60.0) as u64;
        let total: f64 = (0..=upper).map(|a| dyad_log_pmf(a, lambda, nz).unwrap().exp()).sum();
        assert!((total - 1.0).abs() < 1e-10, "lambda {lambda}, nonzero {nz}: {total}");
    }
}
