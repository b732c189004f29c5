//! Limit laws of the extinction time and the predictions that standardize it.

use super::{critical_mean, subcritical_mean, supercritical_mean};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::EULER_GAMMA;

/// Limit law of a standardized extinction time `x = (t - shift) / scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// Unit exponential: survival `e^{-x}`, `x ≥ 0`.
    Exponential,
    /// Standard Gumbel: `e^{-e^{-x}}`.
    Gumbel,
    /// `exp{-(λx)^{-1}}`, `x > 0`.
    Frechet { lambda: f64 },
}

impl LimitLaw {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            LimitLaw::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            LimitLaw::Gumbel => (-(-x).exp()).exp(),
            LimitLaw::Frechet { lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    (-1.0 / (lambda * x)).exp()
                }
            }
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            LimitLaw::Exponential => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x).exp()
                }
            }
            LimitLaw::Gumbel => -(-(-x).exp()).exp_m1(),
            LimitLaw::Frechet { lambda } => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-1.0 / (lambda * x)).exp_m1()
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitLaw::Exponential => "exponential",
            LimitLaw::Gumbel => "gumbel",
            LimitLaw::Frechet { .. } => "frechet",
        }
    }
}

/// Predicted mean and limit law of `τ` for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionSet {
    pub regime: Regime,
    /// Predicted mean; infinite where the mean does not exist.
    pub mean: f64,
    pub log_mean: f64,
    pub shift: f64,
    pub scale: f64,
    /// `None` where no limit law is known.
    pub law: Option<LimitLaw>,
}

impl PredictionSet {
    pub fn standardize(&self, t: f64) -> f64 {
        (t - self.shift) / self.scale
    }

    /// Limiting `P(τ ≤ t)`.
    pub fn cdf(&self, t: f64) -> Option<f64> {
        self.law.map(|law| law.cdf(self.standardize(t)))
    }
}

/// `law.cdf(x)` for an already standardized `x`.
pub fn limit_cdf(pred: &PredictionSet, x: f64) -> Option<f64> {
    pred.law.map(|law| law.cdf(x))
}

/// Prediction for the process with competition started from `m_θ ≈ a/θ`.
///
/// * supercritical: `τ / (c1√θ e^{c2/θ})` is asymptotically unit exponential;
/// * subcritical: `(μ-λ)τ - [ln(a/θ) + ln((μ-λ)/μ) + ln((μ-λ)/(μ-λ+a))]` is
///   asymptotically Gumbel;
/// * critical: only the mean is predicted.
pub fn predict(params: &ModelParams, a: f64) -> Result<PredictionSet> {
    params.require_competition()?;
    match params.regime() {
        Regime::Supercritical => {
            let m = supercritical_mean(params)?;
            Ok(PredictionSet {
                regime: Regime::Supercritical,
                mean: m.value,
                log_mean: m.log_value,
                shift: 0.0,
                scale: m.value,
                law: Some(LimitLaw::Exponential),
            })
        }
        Regime::Subcritical => {
            let mean = subcritical_mean(params, a)?;
            let scale = 1.0 / (params.mu() - params.lambda());
            Ok(PredictionSet {
                regime: Regime::Subcritical,
                mean,
                log_mean: mean.ln(),
                shift: mean - EULER_GAMMA * scale,
                scale,
                law: Some(LimitLaw::Gumbel),
            })
        }
        Regime::Critical => {
            let mean = critical_mean(params)?;
            Ok(PredictionSet {
                regime: Regime::Critical,
                mean,
                log_mean: mean.ln(),
                shift: 0.0,
                scale: mean,
                law: None,
            })
        }
    }
}

/// Large-`m` prediction for the linear process started from `m`.
///
/// * subcritical: `(μ-λ)τ_0 - ln m - ln(1-λ/μ)` is asymptotically Gumbel;
/// * critical: `τ_0 / m` has limit law `exp{-(λx)^{-1}}` and no mean.
pub fn linear_prediction(params: &ModelParams, m: u64) -> Result<PredictionSet> {
    params.require_linear()?;
    if m == 0 {
        return Err(Error::parameter("linear prediction needs m ≥ 1"));
    }
    let (l, mu) = (params.lambda(), params.mu());
    match params.regime() {
        Regime::Subcritical => {
            let scale = 1.0 / (mu - l);
            let shift = ((m as f64).ln() + (-l / mu).ln_1p()) * scale;
            let mean = shift + EULER_GAMMA * scale;
            Ok(PredictionSet {
                regime: Regime::Subcritical,
                mean,
                log_mean: mean.ln(),
                shift,
                scale,
                law: Some(LimitLaw::Gumbel),
            })
        }
        Regime::Critical => Ok(PredictionSet {
            regime: Regime::Critical,
            mean: f64::INFINITY,
            log_mean: f64::INFINITY,
            shift: 0.0,
            scale: m as f64,
            law: Some(LimitLaw::Frechet { lambda: l }),
        }),
        Regime::Supercritical => Err(Error::regime(
            "the linear supercritical process survives with positive probability",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn anchors() {
        assert!((LimitLaw::Gumbel.cdf(0.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((LimitLaw::Gumbel.cdf(-(2f64.ln().ln())) - 0.5).abs() < 1e-15);
        assert_eq!(LimitLaw::Exponential.survival(0.0), 1.0);
        assert_eq!(LimitLaw::Exponential.cdf(0.0), 0.0);
        let f = LimitLaw::Frechet { lambda: 2.0 };
        assert!((f.cdf(0.5) - (-1f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn predictions_by_regime() {
        let sub = predict(&ModelParams::new(1.0, 2.0, 0.001).unwrap(), 1.0).unwrap();
        assert_eq!(sub.law, Some(LimitLaw::Gumbel));
        assert!((sub.shift + EULER_GAMMA * sub.scale - sub.mean).abs() < 1e-12);
        let sup = predict(&ModelParams::new(2.0, 1.0, 0.1).unwrap(), 1.0).unwrap();
        assert_eq!(sup.law, Some(LimitLaw::Exponential));
        assert!((sup.cdf(sup.mean).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let crit = predict(&ModelParams::new(1.0, 1.0, 0.001).unwrap(), 1.0).unwrap();
        assert!(crit.law.is_none() && crit.cdf(1.0).is_none());
        assert!(predict(&ModelParams::linear(1.0, 2.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn linear_predictions() {
        let p = linear_prediction(&ModelParams::linear(1.0, 1.0).unwrap(), 10).unwrap();
        assert!((p.cdf(10.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let s = linear_prediction(&ModelParams::linear(1.0, 2.0).unwrap(), 100).unwrap();
        assert!((s.shift - (100f64.ln() + 0.5f64.ln())).abs() < 1e-14);
        assert!(linear_prediction(&ModelParams::linear(2.0, 1.0).unwrap(), 10).is_err());
    }

    proptest! {
        #[test]
        fn cdfs_monotone_and_bounded(x in -20.0f64..50.0, dx in 0.0f64..5.0, l in 0.1f64..5.0) {
            for law in [LimitLaw::Exponential, LimitLaw::Gumbel, LimitLaw::Frechet { lambda: l }] {
                let (a, b) = (law.cdf(x), law.cdf(x + dx));
                prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
                prop_assert!(a <= b);
                prop_assert!((law.cdf(x) + law.survival(x) - 1.0).abs() < 1e-15);
            }
        }
    }
}
