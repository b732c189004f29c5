//! Small-`θ` predictions.
//!
//! Quantities of size `e^{±c2/θ}` are returned as [`Asymptote`] so callers
//! can work with the logarithm once the linear value leaves the `f64` range.

mod fluid;
mod laws;
mod lemma;
mod means;

pub use fluid::{descent_time, fluid_solution, hxt_integral, FluidCurve, DEFAULT_DESCENT_ALPHA};
pub use laws::{limit_cdf, linear_prediction, predict, LimitLaw, PredictionSet};
pub use lemma::{lemma_error_sup, pi_approx, v_function, w_function, PiApprox};
pub use means::{
    critical_mean, mean_reduction, reciprocal_sum_asymptote, subcritical_mean, supercritical_mean,
    upcross_deficit_asymptote,
};

use crate::error::Result;
use crate::model::{ModelParams, Regime};

/// A positive value together with its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub value: f64,
    pub log_value: f64,
}

impl Asymptote {
    pub fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
        }
    }
}

/// `c1 = λ(λ-μ)^{-2}√(2π/μ)` and `c2 = λ - μ - μ ln(λ/μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupercriticalConstants {
    pub c1: f64,
    pub c2: f64,
}

/// `u - ln(1+u)`, with a power series near zero where the direct form cancels.
fn excess_over_log1p(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        // Σ_{k≥2} (-1)^k u^k / k
        let mut term = u * u;
        let mut acc = 0.0;
        for k in 2..=12 {
            acc += term / k as f64;
            term *= -u;
        }
        acc
    } else {
        u - u.ln_1p()
    }
}

pub fn constants(params: &ModelParams) -> Result<SupercriticalConstants> {
    params.require_regime(Regime::Supercritical)?;
    let (l, mu) = (params.lambda(), params.mu());
    let d = l - mu;
    Ok(SupercriticalConstants {
        c1: l / (d * d) * (2.0 * std::f64::consts::PI / mu).sqrt(),
        c2: mu * excess_over_log1p(d / mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn constant_examples() {
        let k = constants(&ModelParams::linear(2.0, 1.0).unwrap()).unwrap();
        assert!((k.c1 - 2.0 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((k.c2 - (1.0 - 2f64.ln())).abs() < 1e-15);
        let k = constants(&ModelParams::linear(1.5, 1.0).unwrap()).unwrap();
        assert!((k.c2 - 0.094_535).abs() < 1e-6);
        assert!(matches!(
            constants(&ModelParams::linear(1.0, 1.0).unwrap()),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn c2_positive_and_vanishing_at_criticality() {
        for mu in [0.1, 0.5, 1.0, 3.0] {
            for r in [1.0 + 1e-12, 1.0 + 1e-6, 1.001, 1.0099, 1.0101, 1.5, 4.0, 100.0] {
                let k = constants(&ModelParams::linear(r * mu, mu).unwrap()).unwrap();
                assert!(k.c2 > 0.0, "μ={mu} r={r}");
            }
        }
        let near = constants(&ModelParams::linear(1.0 + 1e-6, 1.0).unwrap()).unwrap();
        assert!((near.c2 - 0.5e-12).abs() < 1e-18);
    }

    #[test]
    fn series_and_direct_agree_at_switch() {
        for u in [0.0099, 0.01, 0.0101, -0.0099] {
            let direct = u - f64::ln_1p(u);
            let series = {
                let mut term = u * u;
                let mut acc = 0.0;
                for k in 2..=12 {
                    acc += term / k as f64;
                    term *= -u;
                }
                acc
            };
            assert!(((direct - series) / series).abs() < 1e-10);
        }
    }
}
