use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::ks::ks_statistic;
use super::path::{sample_extinction_with, SimConfig};
use super::rng::{replicate_rng, RNG_ALGORITHM};
use crate::error::{Error, Result};

/// Run `n` replicates, replicate `r` drawing from stream `(master, grid, r)`.
/// Results come back in replicate order whatever the scheduling.
pub fn run_replicates<T, F>(master: u64, grid: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync + Send,
{
    let one = |r: u64| f(&mut replicate_rng(master, grid, r));
    #[cfg(feature = "parallel")]
    {
        (0..n as u64).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as u64).map(one).collect()
    }
}

/// Sample summary with an optional goodness-of-fit statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub n: usize,
    pub mean: f64,
    pub sample_sd: f64,
    pub std_error: f64,
    /// Replicates stopped by a cap; their values are lower bounds.
    pub capped: usize,
    /// Sorted sample, the support of the empirical CDF.
    pub support: Vec<f64>,
    pub ks: Option<f64>,
    pub rng_algorithm: &'static str,
}

impl EstimatorReport {
    pub fn from_samples(mut samples: Vec<f64>, capped: usize, reference: Option<&dyn Fn(f64) -> f64>) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::parameter("an estimate needs at least two replicates"));
        }
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        let sample_sd = (ss / (nf - 1.0)).sqrt();
        samples.sort_by(f64::total_cmp);
        let ks = reference.map(|cdf| ks_statistic(&samples, cdf));
        Ok(Self {
            n,
            mean,
            sample_sd,
            std_error: sample_sd / nf.sqrt(),
            capped,
            support: samples,
            ks,
            rng_algorithm: RNG_ALGORITHM,
        })
    }

    /// Empirical `P(X ≤ x)`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.support.partition_point(|&v| v <= x) as f64 / self.n as f64
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error
    }
}

/// Extinction-time statistics over `replicates` independent paths.
pub fn estimate(cfg: &SimConfig, replicates: usize, reference: Option<&dyn Fn(f64) -> f64>) -> Result<EstimatorReport> {
    cfg.validate()?;
    let paths = run_replicates(cfg.seed, cfg.grid, replicates, |rng| sample_extinction_with(cfg, rng));
    let capped = paths.iter().filter(|p| p.capped).count();
    EstimatorReport::from_samples(paths.into_iter().map(|p| p.tau).collect(), capped, reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{expected_absorption, DEFAULT_REL_TOL};
    use crate::model::ModelParams;

    #[test]
    fn constant_sample_has_zero_error() {
        let r = EstimatorReport::from_samples(vec![2.5; 10], 0, None).unwrap();
        assert_eq!((r.mean, r.std_error), (2.5, 0.0));
        assert_eq!(r.ecdf(2.4), 0.0);
        assert_eq!(r.ecdf(2.5), 1.0);
        assert!(EstimatorReport::from_samples(vec![1.0], 0, None).is_err());
    }

    #[test]
    fn linear_subcritical_mean_is_ln2() {
        let cfg = SimConfig::new(ModelParams::linear(1.0, 2.0).unwrap(), 1, 2024);
        let r = estimate(&cfg, 100_000, None).unwrap();
        assert!(r.z_score(std::f64::consts::LN_2) < 3.0, "{} ± {}", r.mean, r.std_error);
        assert_eq!(r.rng_algorithm, RNG_ALGORITHM);
    }

    #[test]
    fn mean_matches_series() {
        let params = ModelParams::new(1.0, 2.0, 0.01).unwrap();
        let cfg = SimConfig::new(params, 10, 77);
        let r = estimate(&cfg, 100_000, None).unwrap();
        let exact = expected_absorption(&params, 10, DEFAULT_REL_TOL).unwrap().value;
        assert!(r.z_score(exact) < 3.0, "{} ± {} vs {exact}", r.mean, r.std_error);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SimConfig::new(ModelParams::new(2.0, 1.0, 0.2).unwrap(), 3, 5).with_grid(4);
        let a = estimate(&cfg, 500, None).unwrap();
        let b = estimate(&cfg, 500, None).unwrap();
        assert_eq!(a, b);
        let c = estimate(&cfg.with_grid(5), 500, None).unwrap();
        assert_ne!(a.mean, c.mean);
    }
}
