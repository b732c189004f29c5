use rand_chacha::rand_core::RngCore;

use super::rng::{exponential, open_uniform, replicate_rng};
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;
pub const DEFAULT_MAX_TIME: f64 = 1e6;

/// One simulation run: parameters, start, seed and caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub m0: u64,
    pub seed: u64,
    /// Grid index mixed into the replicate streams.
    pub grid: u64,
    pub max_steps: u64,
    pub max_time: f64,
}

impl SimConfig {
    pub fn new(params: ModelParams, m0: u64, seed: u64) -> Self {
        Self {
            params,
            m0,
            seed,
            grid: 0,
            max_steps: DEFAULT_MAX_STEPS,
            max_time: DEFAULT_MAX_TIME,
        }
    }

    pub fn with_grid(mut self, grid: u64) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_caps(mut self, max_steps: u64, max_time: f64) -> Self {
        self.max_steps = max_steps;
        self.max_time = max_time;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 || self.max_time.is_nan() || self.max_time <= 0.0 {
            return Err(Error::parameter("simulation caps must be positive"));
        }
        Ok(())
    }
}

/// Outcome of one path. When `capped`, `tau` is only a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub tau: f64,
    pub steps: u64,
    pub max_level: u64,
    pub capped: bool,
}

/// Jump-by-jump simulation of the process.
#[derive(Debug, Clone)]
pub struct Walker {
    params: ModelParams,
    state: u64,
    time: f64,
    steps: u64,
    max_level: u64,
}

impl Walker {
    pub fn new(params: ModelParams, start: u64) -> Self {
        Self::resume(params, start, 0.0)
    }

    pub fn resume(params: ModelParams, state: u64, time: f64) -> Self {
        Self {
            params,
            state,
            time,
            steps: 0,
            max_level: state,
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn max_level(&self) -> u64 {
        self.max_level
    }

    /// Make one jump and return the holding time that preceded it, or `None`
    /// once the process is at zero.
    #[inline]
    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> Option<f64> {
        let i = self.state;
        if i == 0 {
            return None;
        }
        let up = self.params.birth_rate(i);
        let total = up + self.params.death_rate(i);
        let hold = exponential(rng, total);
        self.time += hold;
        self.steps += 1;
        if open_uniform(rng) * total < up {
            self.state += 1;
            self.max_level = self.max_level.max(self.state);
        } else {
            self.state -= 1;
        }
        Some(hold)
    }

    /// Run to absorption or to a cap.
    pub fn run_to_extinction<R: RngCore + ?Sized>(mut self, rng: &mut R, max_steps: u64, max_time: f64) -> PathSample {
        while self.state > 0 {
            if self.steps >= max_steps {
                return self.capped(self.time);
            }
            self.step(rng);
            if self.time > max_time {
                return self.capped(max_time);
            }
        }
        PathSample {
            tau: self.time,
            steps: self.steps,
            max_level: self.max_level,
            capped: false,
        }
    }

    fn capped(&self, tau: f64) -> PathSample {
        PathSample {
            tau,
            steps: self.steps,
            max_level: self.max_level,
            capped: true,
        }
    }
}

/// Extinction time of one path drawn with the given generator.
pub fn sample_extinction_with<R: RngCore + ?Sized>(cfg: &SimConfig, rng: &mut R) -> PathSample {
    Walker::new(cfg.params, cfg.m0).run_to_extinction(rng, cfg.max_steps, cfg.max_time)
}

/// Extinction time of replicate 0 of the configured stream.
pub fn sample_extinction(cfg: &SimConfig) -> Result<PathSample> {
    cfg.validate()?;
    let mut rng = replicate_rng(cfg.seed, cfg.grid, 0);
    Ok(sample_extinction_with(cfg, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::estimate::estimate;
    use crate::sim::ks::{ks_critical_1pct, ks_statistic};

    #[test]
    fn zero_start_is_immediate() {
        let cfg = SimConfig::new(ModelParams::new(1.0, 2.0, 0.1).unwrap(), 0, 1);
        let s = sample_extinction(&cfg).unwrap();
        assert_eq!((s.tau, s.steps, s.capped), (0.0, 0, false));
    }

    #[test]
    fn pure_death_mean_is_one() {
        let cfg = SimConfig::new(ModelParams::pure_death(1.0, 0.0).unwrap(), 1, 11);
        let r = estimate(&cfg, 100_000, None).unwrap();
        assert!((r.mean - 1.0).abs() < 3.0 * r.std_error, "{} ± {}", r.mean, r.std_error);
    }

    #[test]
    fn caps_are_reported() {
        let params = ModelParams::linear(2.0, 1.0).unwrap();
        let cfg = SimConfig::new(params, 50, 3).with_caps(1000, 1e6);
        let s = sample_extinction(&cfg).unwrap();
        assert!(s.capped && s.steps == 1000);
        let cfg = SimConfig::new(params, 50, 3).with_caps(u64::MAX, 2.0);
        let s = sample_extinction(&cfg).unwrap();
        assert!(s.capped && s.tau == 2.0);
        assert!(SimConfig::new(params, 5, 0).with_caps(0, 1.0).validate().is_err());
    }

    #[test]
    fn holding_times_are_exponential() {
        let params = ModelParams::new(1.0, 1.0, 0.05).unwrap();
        let state = 5u64;
        let rate = params.birth_rate(state) + params.death_rate(state);
        let mut rng = replicate_rng(99, 0, 0);
        let mut pooled = Vec::new();
        while pooled.len() < 5000 {
            let mut w = Walker::new(params, 8);
            loop {
                let before = w.state();
                match w.step(&mut rng) {
                    Some(h) if before == state => pooled.push(h * rate),
                    Some(_) => {}
                    None => break,
                }
            }
        }
        pooled.sort_by(f64::total_cmp);
        let d = ks_statistic(&pooled, |x| -(-x).exp_m1());
        assert!(d < ks_critical_1pct(pooled.len()), "KS {d}");
    }
}
