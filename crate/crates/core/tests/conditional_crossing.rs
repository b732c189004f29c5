//! Conditional crossing times against direct simulation of the jump process.

use logistic_bd::exact::{beta_down, beta_up};
use logistic_bd::sim::{run_replicates, EstimatorReport, Walker};
use logistic_bd::ModelParams;

/// Mean time from `start` to `target` over paths that reach `target` before
/// `avoid`, from `n` accepted paths.
fn conditional_mean(params: ModelParams, start: u64, target: u64, avoid: u64, n: usize) -> EstimatorReport {
    let times: Vec<f64> = run_replicates(17, start * 1000 + target, n, |rng| loop {
        let mut w = Walker::new(params, start);
        while w.state() != target && w.state() != avoid {
            w.step(rng);
        }
        if w.state() == target {
            break w.time();
        }
    });
    EstimatorReport::from_samples(times, 0, None).unwrap()
}

#[test]
fn upward_crossing_matches_simulation() {
    let params = ModelParams::linear(1.0, 1.0).unwrap();
    let r = conditional_mean(params, 2, 3, 0, 100_000);
    let exact = beta_up(&params, 2, 0).unwrap();
    assert!(r.z_score(exact) < 3.0, "{} ± {} vs {exact}", r.mean, r.std_error);
}

#[test]
fn downward_crossing_matches_simulation() {
    let params = ModelParams::new(1.5, 1.0, 0.2).unwrap();
    let r = conditional_mean(params, 1, 0, 4, 100_000);
    let exact = beta_down(&params, 1, 4).unwrap();
    assert!(r.z_score(exact) < 3.0, "{} ± {} vs {exact}", r.mean, r.std_error);
}

#[test]
fn upward_crossing_with_competition() {
    let params = ModelParams::new(2.0, 1.0, 0.1).unwrap();
    let r = conditional_mean(params, 6, 7, 2, 50_000);
    let exact = beta_up(&params, 6, 2).unwrap();
    assert!(r.z_score(exact) < 3.0, "{} ± {} vs {exact}", r.mean, r.std_error);
}
