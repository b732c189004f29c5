//! Monotone coupling of `X_θ` with the linear process `X_0`.
//!
//! From a diagonal state `(i, i)` the pair moves to `(i+1, i+1)` at rate
//! `λi`, to `(i-1, i-1)` at rate `μi` and to `(i-1, i)` at rate `θi(i-1)`.
//! Off the diagonal `(i, j)`, `i < j`, the components evolve independently
//! with their own rates. The first component never exceeds the second.

use rand_chacha::rand_core::RngCore;

use super::estimate::run_replicates;
use super::path::{SimConfig, Walker};
use super::rng::{exponential, open_uniform, replicate_rng};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};

/// Bound on the probability that a surviving linear lineage, once at the
/// survival level, still dies out.
pub const SURVIVAL_LEVEL_TOLERANCE: f64 = 1e-8;

/// Level `L = ⌈ln(1e-8)/ln(μ/λ)⌉` at which a supercritical linear component
/// counts as surviving. `None` when `λ ≤ μ`.
pub fn survival_level(params: &ModelParams) -> Option<u64> {
    (params.regime() == Regime::Supercritical).then(|| {
        let l = SURVIVAL_LEVEL_TOLERANCE.ln() / (params.mu() / params.lambda()).ln();
        (l.ceil() as u64).max(1)
    })
}

/// One coupled run from `(m, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSample {
    /// Index of the jump that left the diagonal; `None` if the pair never split.
    pub kappa: Option<u64>,
    pub tau_theta: f64,
    /// `+∞` once the linear component reaches the survival level.
    pub tau_0: f64,
    pub linear_died: bool,
    pub steps: u64,
    pub capped: bool,
}

fn coupled_run<R: RngCore + ?Sized>(cfg: &SimConfig, rng: &mut R, follow_theta: bool) -> CouplingSample {
    let p = cfg.params;
    let (l, mu, th) = (p.lambda(), p.mu(), p.theta());
    let level = survival_level(&p);
    let (mut i, mut j) = (cfg.m0, cfg.m0);
    let mut t = 0.0;
    let mut steps = 0u64;
    let mut kappa = None;
    let mut tau_theta = if i == 0 { Some(0.0) } else { None };
    let capped_sample = |kappa, t, steps| CouplingSample {
        kappa,
        tau_theta: t,
        tau_0: t,
        linear_died: false,
        steps,
        capped: true,
    };
    loop {
        if j == 0 {
            return CouplingSample {
                kappa,
                tau_theta: tau_theta.unwrap_or(t),
                tau_0: t,
                linear_died: true,
                steps,
                capped: false,
            };
        }
        let survived = level.is_some_and(|lv| j >= lv);
        // keep the pair together until it splits, so κ is always observed when θ > 0
        if survived && (kappa.is_some() || th == 0.0) {
            break;
        }
        if steps >= cfg.max_steps {
            return capped_sample(kappa, t, steps);
        }
        let (fi, fj) = (i as f64, j as f64);
        if i == j {
            let split = th * fi * (fi - 1.0);
            let total = (l + mu) * fi + split;
            t += exponential(rng, total);
            steps += 1;
            let u = open_uniform(rng) * total;
            if u < l * fi {
                i += 1;
                j += 1;
            } else if u < (l + mu) * fi {
                i -= 1;
                j -= 1;
            } else {
                i -= 1;
                kappa = Some(steps);
            }
        } else {
            let (up_i, down_i) = (l * fi, mu * fi + th * fi * (fi - 1.0));
            let (up_j, down_j) = (l * fj, mu * fj);
            let total = up_i + down_i + up_j + down_j;
            t += exponential(rng, total);
            steps += 1;
            let u = open_uniform(rng) * total;
            if u < up_i {
                i += 1;
            } else if u < up_i + down_i {
                i -= 1;
            } else if u < up_i + down_i + up_j {
                j += 1;
            } else {
                j -= 1;
            }
        }
        assert!(i <= j, "coupling dominance violated at ({i}, {j})");
        if t > cfg.max_time {
            return capped_sample(kappa, cfg.max_time, steps);
        }
        if i == 0 && tau_theta.is_none() {
            tau_theta = Some(t);
        }
    }
    // the linear component survives; follow the first one alone
    let tau_theta = match tau_theta {
        Some(v) => v,
        None if th == 0.0 || !follow_theta => f64::INFINITY,
        None => {
            let rest =
                Walker::resume(p, i, t).run_to_extinction(rng, cfg.max_steps.saturating_sub(steps), cfg.max_time);
            if rest.capped {
                return capped_sample(kappa, rest.tau, steps + rest.steps);
            }
            steps += rest.steps;
            rest.tau
        }
    };
    CouplingSample {
        kappa,
        tau_theta,
        tau_0: f64::INFINITY,
        linear_died: false,
        steps,
        capped: false,
    }
}

pub fn sample_coupled_with<R: RngCore + ?Sized>(cfg: &SimConfig, rng: &mut R) -> CouplingSample {
    coupled_run(cfg, rng, true)
}

/// Coupled run for replicate 0 of the configured stream.
pub fn sample_coupled(cfg: &SimConfig) -> Result<CouplingSample> {
    cfg.validate()?;
    Ok(sample_coupled_with(cfg, &mut replicate_rng(cfg.seed, cfg.grid, 0)))
}

/// Empirical `P(κ_θ ≤ n)` and the bound `(m+n)nθ/(λ+μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub replicates: usize,
}

/// Only the jump chain matters for `κ_θ`, so no times are drawn.
pub fn separation_probability(cfg: &SimConfig, horizon: u64, replicates: usize) -> Result<SeparationEstimate> {
    if horizon == 0 || replicates == 0 {
        return Err(Error::parameter(
            "separation estimate needs n ≥ 1 and at least one replicate",
        ));
    }
    let p = cfg.params;
    let (l, mu, th) = (p.lambda(), p.mu(), p.theta());
    let hits = run_replicates(cfg.seed, cfg.grid, replicates, |rng| {
        let mut i = cfg.m0;
        for _ in 0..horizon {
            if i == 0 {
                return false;
            }
            let fi = i as f64;
            let total = (l + mu) * fi + th * fi * (fi - 1.0);
            let u = open_uniform(rng) * total;
            if u < l * fi {
                i += 1;
            } else if u < (l + mu) * fi {
                i -= 1;
            } else {
                return true;
            }
        }
        false
    })
    .into_iter()
    .filter(|&h| h)
    .count();
    let n = replicates as f64;
    let estimate = hits as f64 / n;
    let (m, h) = (cfg.m0 as f64, horizon as f64);
    Ok(SeparationEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / n).sqrt(),
        bound: (m + h) * h * th / (l + mu),
        replicates,
    })
}

/// Event on the linear component to condition on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    LinearDiesOut,
    /// Approximated by the linear component reaching [`survival_level`].
    LinearSurvives,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedSample {
    pub sample: CouplingSample,
    /// Coupled runs drawn, the accepted one included.
    pub attempts: u64,
}

/// Rejection sampling of the coupled process given the fate of the linear
/// component.
pub fn conditioned_sample<R: RngCore + ?Sized>(
    cfg: &SimConfig,
    condition: Condition,
    budget: u64,
    rng: &mut R,
) -> Result<ConditionedSample> {
    cfg.validate()?;
    if condition == Condition::LinearSurvives && survival_level(&cfg.params).is_none() {
        return Err(Error::RejectionBudgetExceeded { attempts: 0 });
    }
    let want_died = condition == Condition::LinearDiesOut;
    for attempts in 1..=budget {
        // a rejected survivor need not be followed to extinction
        let sample = coupled_run(cfg, rng, !want_died);
        if sample.linear_died == want_died && !sample.capped {
            return Ok(ConditionedSample { sample, attempts });
        }
    }
    Err(Error::RejectionBudgetExceeded { attempts: budget })
}
