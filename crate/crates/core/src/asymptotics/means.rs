use std::f64::consts::PI;

use super::{constants, Asymptote};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::EULER_GAMMA;

fn check_start_density(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::parameter(format!(
            "scaled initial size a must be positive, got {a}"
        )))
    }
}

/// `E(τ_θ) ~ c1 √θ e^{c2/θ}` for `λ > μ`.
pub fn supercritical_mean(params: &ModelParams) -> Result<Asymptote> {
    let k = constants(params)?;
    params.require_competition()?;
    let th = params.theta();
    Ok(Asymptote::from_log(k.c1.ln() + 0.5 * th.ln() + k.c2 / th))
}

/// `E(τ_θ)` for `λ < μ` started from `m_θ ≈ a/θ`:
/// `[ln(a/θ) + ln((μ-λ)/μ) + ln((μ-λ)/(μ-λ+a)) + γ] / (μ-λ)`.
pub fn subcritical_mean(params: &ModelParams, a: f64) -> Result<f64> {
    params.require_regime(Regime::Subcritical)?;
    params.require_competition()?;
    check_start_density(a)?;
    let (l, mu, th) = (params.lambda(), params.mu(), params.theta());
    let d = mu - l;
    Ok(((a / th).ln() + (d / mu).ln() + (d / (d + a)).ln() + EULER_GAMMA) / d)
}

/// Limit of `E(τ_0) - E(τ_θ)` for `λ < μ`: `ln((μ-λ+a)/(μ-λ)) / (μ-λ)`.
pub fn mean_reduction(params: &ModelParams, a: f64) -> Result<f64> {
    params.require_regime(Regime::Subcritical)?;
    check_start_density(a)?;
    let d = params.mu() - params.lambda();
    Ok((a / d).ln_1p() / d)
}

/// `E(τ_θ) ~ (π/2)^{3/2} / √(θμ)` for `λ = μ`.
pub fn critical_mean(params: &ModelParams) -> Result<f64> {
    params.require_regime(Regime::Critical)?;
    params.require_competition()?;
    Ok((PI / 2.0).powf(1.5) / (params.theta() * params.mu()).sqrt())
}

/// `1 - Q_{i_θ} ~ (λ-μ)√μ λ^{-3/2} e^{-c2/θ}`.
pub fn upcross_deficit_asymptote(params: &ModelParams) -> Result<Asymptote> {
    let k = constants(params)?;
    params.require_competition()?;
    let (l, mu) = (params.lambda(), params.mu());
    Ok(Asymptote::from_log(
        (l - mu).ln() + 0.5 * mu.ln() - 1.5 * l.ln() - k.c2 / params.theta(),
    ))
}

/// `Σ_{j≥1} 1/(λ_j π_j) ~ √(2πθ) e^{c2/θ} / ((λ-μ)√μ)`.
pub fn reciprocal_sum_asymptote(params: &ModelParams) -> Result<Asymptote> {
    let k = constants(params)?;
    params.require_competition()?;
    let (l, mu, th) = (params.lambda(), params.mu(), params.theta());
    Ok(Asymptote::from_log(
        0.5 * (2.0 * PI * th).ln() + k.c2 / th - (l - mu).ln() - 0.5 * mu.ln(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{excursion_decomposition, expected_step_down, log_upcross_deficit};
    use crate::model::carrying_capacity;

    fn p(l: f64, m: f64, t: f64) -> ModelParams {
        ModelParams::new(l, m, t).unwrap()
    }

    #[test]
    fn supercritical_examples() {
        let v = supercritical_mean(&p(1.5, 1.0, 0.05)).unwrap().value;
        assert!((v - 22.3).abs() < 0.05, "{v}");
        let lv = supercritical_mean(&p(2.0, 1.0, 0.01)).unwrap().log_value;
        let want = (2.0 * (2.0 * PI).sqrt() * 0.1f64).ln() + (1.0 - 2f64.ln()) / 0.01;
        assert!((lv - want).abs() < 1e-12);
        assert!(matches!(supercritical_mean(&p(1.0, 2.0, 0.1)), Err(Error::Regime(_))));
        assert!(supercritical_mean(&p(2.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn supercritical_ratio_tends_to_one() {
        let mut last = f64::INFINITY;
        for th in [0.05, 0.02, 0.01] {
            let params = p(2.0, 1.0, th);
            let exact = excursion_decomposition(&params, 1e-12).unwrap().log_mean;
            let dev = (exact - supercritical_mean(&params).unwrap().log_value).exp_m1().abs();
            assert!(dev < last, "θ={th}: {dev}");
            last = dev;
        }
    }

    #[test]
    fn subcritical_examples() {
        let v = subcritical_mean(&p(1.0, 2.0, 0.001), 1.0).unwrap();
        assert!((v - 6.0987).abs() < 1e-4, "{v}");
        let r = mean_reduction(&ModelParams::linear(1.0, 2.0).unwrap(), 1.0).unwrap();
        assert!((r - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(
            subcritical_mean(&p(2.0, 1.0, 0.01), 1.0),
            Err(Error::Regime(_))
        ));
        assert!(subcritical_mean(&p(1.0, 2.0, 0.01), 0.0).is_err());
    }

    #[test]
    fn critical_examples() {
        let v = critical_mean(&p(1.0, 1.0, 0.001)).unwrap();
        assert!((v - 62.26).abs() < 0.01, "{v}");
        let w = critical_mean(&p(2.0, 2.0, 0.001)).unwrap();
        assert!((w - v / 2f64.sqrt()).abs() < 1e-12);
        assert!((w - 44.02).abs() < 0.01);
        assert!(matches!(critical_mean(&p(1.0, 2.0, 0.01)), Err(Error::Regime(_))));
    }

    #[test]
    fn deficit_example_and_convergence() {
        let v = upcross_deficit_asymptote(&p(2.0, 1.0, 0.1)).unwrap().value;
        assert!((v - 0.01646).abs() < 3e-5, "{v}");
        let mut last = f64::INFINITY;
        for th in [0.1, 0.05, 0.02] {
            let params = p(2.0, 1.0, th);
            let cap = carrying_capacity(&params).unwrap().get() as usize;
            let exact = log_upcross_deficit(&params, cap).unwrap();
            let dev = (exact - upcross_deficit_asymptote(&params).unwrap().log_value)
                .exp_m1()
                .abs();
            assert!(dev < last, "θ={th}: {dev}");
            last = dev;
        }
        assert!(matches!(
            upcross_deficit_asymptote(&p(1.0, 2.0, 0.1)),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn reciprocal_sum_example_and_convergence() {
        let v = reciprocal_sum_asymptote(&p(2.0, 1.0, 0.1)).unwrap().value;
        assert!((v - 17.06).abs() < 0.01, "{v}");
        let mut last = f64::INFINITY;
        for th in [0.1, 0.05, 0.02] {
            let params = p(2.0, 1.0, th);
            // Σ_{j≥1} 1/(λ_j π_j) is the step-down time from 1, since π_0 = 1
            let exact = expected_step_down(&params, 1, 1e-12).unwrap().log_value;
            let dev = (exact - reciprocal_sum_asymptote(&params).unwrap().log_value)
                .exp_m1()
                .abs();
            assert!(dev < last, "θ={th}: {dev}");
            last = dev;
        }
        assert!(matches!(
            reciprocal_sum_asymptote(&p(1.0, 1.0, 0.1)),
            Err(Error::Regime(_))
        ));
    }
}
