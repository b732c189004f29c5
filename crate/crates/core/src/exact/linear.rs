//! Closed forms for the linear process (`θ = 0`).

use crate::error::Result;
use crate::model::{ModelParams, Regime};
use crate::EULER_GAMMA;

/// `P_m(τ_0 ≤ t)` for the linear process started from `m`.
pub fn linear_tau0_cdf(params: &ModelParams, m: u64, t: f64) -> Result<f64> {
    params.require_linear()?;
    if t <= 0.0 || m == 0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    let (l, mu) = (params.lambda(), params.mu());
    let base = if params.regime() == Regime::Critical {
        l * t / (1.0 + l * t)
    } else {
        let em1 = ((mu - l) * t).exp_m1();
        if em1.is_infinite() {
            1.0
        } else {
            mu * em1 / (mu * em1 + mu - l)
        }
    };
    Ok(base.powf(m as f64))
}

/// `P_m(τ_0 < ∞)`: one when `λ ≤ μ`, `(μ/λ)^m` otherwise.
pub fn linear_extinction_prob(params: &ModelParams, m: u64) -> Result<f64> {
    params.require_linear()?;
    let (l, mu) = (params.lambda(), params.mu());
    Ok(if l <= mu { 1.0 } else { (mu / l).powf(m as f64) })
}

/// Large-`m` form of `E_m(τ_0)` for `λ < μ`: `(ln m + γ + ln(1 - λ/μ)) / (μ - λ)`.
pub fn linear_subcritical_mean_asymptote(params: &ModelParams, m: u64) -> Result<f64> {
    params.require_linear()?;
    params.require_regime(Regime::Subcritical)?;
    let (l, mu) = (params.lambda(), params.mu());
    Ok(((m as f64).ln() + EULER_GAMMA + (-l / mu).ln_1p()) / (mu - l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::series::{expected_absorption, DEFAULT_REL_TOL};

    fn lin(l: f64, m: f64) -> ModelParams {
        ModelParams::linear(l, m).unwrap()
    }

    #[test]
    fn cdf_examples() {
        let v = linear_tau0_cdf(&lin(1.0, 1.0), 1, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = linear_tau0_cdf(&lin(1.0, 2.0), 1, 2f64.ln()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(linear_tau0_cdf(&lin(1.0, 2.0), 3, 0.0).unwrap(), 0.0);
        assert_eq!(linear_tau0_cdf(&lin(1.0, 2.0), 3, f64::INFINITY).unwrap(), 1.0);
        let sup = linear_tau0_cdf(&lin(2.0, 1.0), 2, 1e6).unwrap();
        assert!((sup - 0.25).abs() < 1e-12);
        assert!(linear_tau0_cdf(&ModelParams::new(1.0, 2.0, 0.1).unwrap(), 1, 1.0).is_err());
    }

    #[test]
    fn extinction_examples() {
        assert_eq!(linear_extinction_prob(&lin(1.0, 2.0), 5).unwrap(), 1.0);
        assert_eq!(linear_extinction_prob(&lin(1.0, 1.0), 5).unwrap(), 1.0);
        assert!((linear_extinction_prob(&lin(2.0, 1.0), 3).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn cdf_mean_matches_series() {
        // E τ = ∫ (1 - F) dt by the trapezoid rule on a fine grid
        for &(l, mu, m) in &[(1.0, 2.0, 1u64), (0.5, 1.0, 4)] {
            let params = lin(l, mu);
            let h = 1e-3;
            let mut integral = 0.0;
            let mut prev = 1.0;
            let mut t = 0.0;
            while prev > 1e-14 {
                t += h;
                let s = 1.0 - linear_tau0_cdf(&params, m, t).unwrap();
                integral += 0.5 * h * (prev + s);
                prev = s;
            }
            let series = expected_absorption(&params, m as usize, DEFAULT_REL_TOL).unwrap().value;
            assert!(((integral - series) / series).abs() < 1e-6, "{integral} vs {series}");
        }
    }

    #[test]
    fn mean_asymptote_gap_shrinks() {
        let params = lin(1.0, 2.0);
        let mut last = f64::INFINITY;
        for m in [10u64, 100, 1000, 10_000] {
            let exact = expected_absorption(&params, m as usize, DEFAULT_REL_TOL).unwrap().value;
            let gap = (exact - linear_subcritical_mean_asymptote(&params, m).unwrap()).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
        assert!(linear_subcritical_mean_asymptote(&lin(2.0, 1.0), 5).is_err());
    }
}
