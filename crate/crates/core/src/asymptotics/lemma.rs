//! Laplace-type approximation of the weights `π_j`.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::weights::WeightTable;

/// `W(x) = x - x ln((μ+x)/λ) - μ ln((μ+x)/μ)`.
///
/// With `λ = μ` this is `x - (μ+x) ln((μ+x)/μ)`, the critical-case exponent,
/// which equals `-V(x)` (see [`v_function`]).
pub fn w_function(params: &ModelParams, x: f64) -> f64 {
    let (l, mu) = (params.lambda(), params.mu());
    let log_mu_ratio = (x / mu).ln_1p();
    let log_lambda_ratio = ((mu + x) / l).ln();
    x - x * log_lambda_ratio - mu * log_mu_ratio
}

/// `V(x) = (x+μ) ln((x+μ)/μ) - x`.
pub fn v_function(mu: f64, x: f64) -> f64 {
    (x + mu) * (x / mu).ln_1p() - x
}

/// `(1 + jθ/μ)^{-1/2} e^{-W(jθ)/θ}` with the `W` value used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiApprox {
    pub value: f64,
    pub log_value: f64,
    pub w: f64,
}

pub fn pi_approx(params: &ModelParams, j: u64) -> Result<PiApprox> {
    params.require_birth()?;
    params.require_competition()?;
    if j == 0 {
        return Err(Error::query("pi_approx needs j ≥ 1"));
    }
    let th = params.theta();
    let x = j as f64 * th;
    let w = w_function(params, x);
    let log_value = -0.5 * (x / params.mu()).ln_1p() - w / th;
    Ok(PiApprox {
        value: log_value.exp(),
        log_value,
        w,
    })
}

/// `sup_{1≤j≤T/θ} |η_j|` where `π_j = approx_j (1 + η_j)`.
pub fn lemma_error_sup(params: &ModelParams, horizon: f64) -> Result<f64> {
    params.require_competition()?;
    let jmax = (horizon / params.theta()).floor() as usize;
    if jmax == 0 {
        return Err(Error::parameter("horizon T must be at least θ"));
    }
    let table = WeightTable::new(params, jmax)?;
    let mut sup = 0.0f64;
    for j in 1..=jmax {
        let approx = pi_approx(params, j as u64)?;
        sup = sup.max((table.log_pi(j) - approx.log_value).exp_m1().abs());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::constants;
    use crate::model::carrying_capacity;

    fn p(l: f64, m: f64, t: f64) -> ModelParams {
        ModelParams::new(l, m, t).unwrap()
    }

    #[test]
    fn w_vanishes_at_zero() {
        for params in [p(2.0, 1.0, 0.1), p(1.0, 2.0, 0.1), p(1.0, 1.0, 0.1)] {
            assert_eq!(w_function(&params, 0.0), 0.0);
        }
    }

    #[test]
    fn critical_w_is_minus_v() {
        for mu in [0.5, 1.0, 2.0] {
            let params = p(mu, mu, 0.01);
            for x in [0.0, 0.1, 1.0, 7.5] {
                let w = w_function(&params, x);
                assert!((w + v_function(mu, x)).abs() < 1e-14 * (1.0 + w.abs()));
                assert!((w - (x - (mu + x) * ((mu + x) / mu).ln())).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn log_weight_at_capacity() {
        let params = p(2.0, 1.0, 0.01);
        let cap = carrying_capacity(&params).unwrap().get();
        let c2 = constants(&params).unwrap().c2;
        let got = pi_approx(&params, cap).unwrap().log_value;
        let want = 0.5 * 0.5f64.ln() - c2 / 0.01;
        assert!((got - want).abs() < 0.05, "{got} vs {want}");
    }

    #[test]
    fn approximation_improves_as_theta_shrinks() {
        for (l, mu) in [(2.0, 1.0), (1.0, 2.0), (1.0, 1.0)] {
            let mut last = f64::INFINITY;
            for th in [0.1, 0.03, 0.01, 0.003] {
                let sup = lemma_error_sup(&p(l, mu, th), 2.0 * l).unwrap();
                assert!(sup < last, "λ={l} μ={mu} θ={th}: {sup} vs {last}");
                last = sup;
            }
        }
    }

    #[test]
    fn needs_competition_and_index() {
        assert!(pi_approx(&p(1.0, 1.0, 0.0), 3).is_err());
        assert!(pi_approx(&p(1.0, 1.0, 0.1), 0).is_err());
    }
}
