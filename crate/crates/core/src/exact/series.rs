//! Expected absorption times as infinite series over the weight table.
//!
//! The series `Σ_k Π_{k∧m} / (λ_k π_k)` and `π_{i-1} Σ_{k≥i} 1/(λ_k π_k)`
//! share the same tail: past the start index consecutive terms have ratio
//! `(k/(k+1))·λ/(μ+kθ)`, which is bounded by `r = λ/(μ+Kθ)` from index `K`
//! on. Once `r < 1` the tail beyond the last summed term `t_K` is at most
//! `t_K·r/(1-r)`, and summation stops when that bound drops below
//! `rel_tol` times the partial sum. All terms are accumulated in the log
//! domain; `value` overflows to `+∞` while `log_value` stays finite.

use crate::error::{Error, Result};
use crate::model::{carrying_capacity, ModelParams, Regime};
use crate::numerics::LogSum;
use crate::weights::WeightTable;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Hard stop on the number of series terms.
const MAX_TERMS: usize = 200_000_000;

/// A series value with the evidence of its truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub log_value: f64,
    /// Index of the last summed term.
    pub truncation_index: usize,
    /// Upper bound on the omitted tail.
    pub tail_bound: f64,
    pub log_tail_bound: f64,
}

impl SeriesResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
            truncation_index: 0,
            tail_bound: 0.0,
            log_tail_bound: f64::NEG_INFINITY,
        }
    }

    fn from_logs(log_value: f64, log_tail_bound: f64, truncation_index: usize) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            truncation_index,
            tail_bound: log_tail_bound.exp(),
            log_tail_bound,
        }
    }
}

fn check_convergent(params: &ModelParams) -> Result<()> {
    params.require_birth()?;
    if params.is_linear() && params.regime() != Regime::Subcritical {
        return Err(Error::Divergence(format!(
            "expected extinction time is infinite for the linear process with λ ≥ μ {params}"
        )));
    }
    Ok(())
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 0.0 && rel_tol < 1.0 {
        Ok(())
    } else {
        Err(Error::parameter(format!("rel_tol must lie in (0, 1), got {rel_tol}")))
    }
}

/// Sum `log_term(table, k)` for `k = start..` until the geometric tail bound
/// holds from `tail_from` on.
fn sum_series<F>(
    params: &ModelParams,
    table: &mut WeightTable,
    start: usize,
    tail_from: usize,
    rel_tol: f64,
    mut log_term: F,
) -> Result<SeriesResult>
where
    F: FnMut(&WeightTable, usize) -> f64,
{
    let log_tol = rel_tol.ln();
    let mut acc = LogSum::new();
    let mut k = start;
    loop {
        table.ensure(k);
        let lt = log_term(table, k);
        acc.push(lt);
        if k >= tail_from {
            let r = params.lambda() / (params.mu() + k as f64 * params.theta());
            if r < 1.0 {
                let log_tail = lt + (r / (1.0 - r)).ln();
                let log_sum = acc.ln();
                if log_tail <= log_tol + log_sum {
                    return Ok(SeriesResult::from_logs(log_sum, log_tail, k));
                }
            }
        }
        k += 1;
        if k - start > MAX_TERMS {
            return Err(Error::NotConverged { terms: MAX_TERMS });
        }
    }
}

/// `E_m(τ) = Σ_{k≥1} Π_{k∧m} / (λ_k π_k)`.
pub fn expected_absorption(params: &ModelParams, m: usize, rel_tol: f64) -> Result<SeriesResult> {
    check_tol(rel_tol)?;
    check_convergent(params)?;
    if m == 0 {
        return Ok(SeriesResult::zero());
    }
    let mut table = WeightTable::new(params, (2 * m).max(64))?;
    let lam = params.lambda();
    sum_series(params, &mut table, 1, m, rel_tol, |t, k| {
        let top = k.min(m);
        t.log_cum_over_pi(top, k) - (k as f64 * lam).ln()
    })
}

/// `E_i(time to reach i-1) = π_{i-1} Σ_{k≥i} 1/(λ_k π_k)`.
pub fn expected_step_down(params: &ModelParams, i: usize, rel_tol: f64) -> Result<SeriesResult> {
    check_tol(rel_tol)?;
    check_convergent(params)?;
    if i == 0 {
        return Err(Error::query("step-down time needs i ≥ 1"));
    }
    let mut table = WeightTable::new(params, (2 * i).max(64))?;
    let lam = params.lambda();
    sum_series(params, &mut table, i, i, rel_tol, |t, k| {
        t.log_pi_ratio(i - 1, k) - (k as f64 * lam).ln()
    })
}

/// Mean duration of an excursion from the carrying capacity `i_θ` that
/// returns to `i_θ` from above:
/// `M_θ = π_{i_θ} Σ_k ψ_k / (λ_k π_k)` with `ψ_k = min(Π_k² / (Π_{i_θ} Π_{i_θ+1}), 1)`.
pub fn excursion_mean(params: &ModelParams, rel_tol: f64) -> Result<SeriesResult> {
    check_tol(rel_tol)?;
    let cap = carrying_capacity(params)?.get() as usize;
    let mut table = WeightTable::new(params, (3 * cap).max(64))?;
    let lam = params.lambda();
    sum_series(params, &mut table, 1, cap + 1, rel_tol, |t, k| {
        let log_psi = if k <= cap {
            t.log_cum_ratio(k, cap) + t.log_cum_ratio(k, cap + 1)
        } else {
            0.0
        };
        log_psi + t.log_pi_ratio(cap, k) - (k as f64 * lam).ln()
    })
}

/// Decomposition of the extinction time from the carrying capacity into a
/// geometric number of excursions above `i_θ` and a final descent to zero.
///
/// Starting at `i_θ`, each attempt either reaches `i_θ + 1` before `0`
/// (probability `Q = Q_{i_θ}`), completing an excursion of mean `M_θ`, or
/// goes to `0` directly. Hence
/// `E_{i_θ}(τ) = M_θ·Q/(1-Q) + Σ_{k=1}^{i_θ} β_k^{i_θ+1}` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcursionDecomposition {
    pub carrying_capacity: u64,
    /// `ln(1 - Q_{i_θ})`.
    pub log_upcross_deficit: f64,
    pub excursion_mean: f64,
    /// `ln E(K)` with `K` counting completed excursions, `E(K) = Q/(1-Q)`.
    pub log_mean_returns: f64,
    /// `ln E(K + 1) = ln(1/(1-Q))`, counting the final failed attempt as well.
    pub log_mean_attempts: f64,
    /// Mean duration of the final descent, `E_{i_θ}(τ | 0 before i_θ+1)`.
    pub final_descent: f64,
    /// `ln(M_θ/(1-Q))`, the leading-order excursion approximation of the mean.
    pub log_excursion_approx: f64,
    /// `ln E_{i_θ}(τ)` assembled from the pieces.
    pub log_mean: f64,
}

pub fn excursion_decomposition(params: &ModelParams, rel_tol: f64) -> Result<ExcursionDecomposition> {
    let cap = carrying_capacity(params)?.get();
    let c = cap as usize;
    let table = WeightTable::new(params, c + 1)?;
    let log_deficit = table.log_upcross_deficit(c);
    let log_q = table.log_cum_ratio(c, c + 1);
    let m = excursion_mean(params, rel_tol)?;
    let final_descent: f64 = table.beta_down_sequence(0, c).iter().sum();
    let log_returns = log_q - log_deficit;
    let log_mean = {
        let mut acc = LogSum::new();
        acc.push(m.log_value + log_returns);
        acc.push(final_descent.ln());
        acc.ln()
    };
    Ok(ExcursionDecomposition {
        carrying_capacity: cap,
        log_upcross_deficit: log_deficit,
        excursion_mean: m.value,
        log_mean_returns: log_returns,
        log_mean_attempts: -log_deficit,
        final_descent,
        log_excursion_approx: m.log_value - log_deficit,
        log_mean,
    })
}
