//! Direct sampling of the linear extinction time.
//!
//! Started from `m`, the linear process is `m` independent copies started
//! from one, so `τ_0` is the largest of `m` single-ancestor extinction times
//! and `P_m(τ_0 ≤ t) = F_1(t)^m`. Inverting `F_1^m` costs one uniform per
//! draw, however large `m` is.

use rand_chacha::rand_core::RngCore;

use super::rng::open_uniform;
use crate::error::Result;
use crate::model::{ModelParams, Regime};

/// One draw of `τ_0` from `m`; `+∞` when the lineage survives.
pub fn sample_linear_extinction<R: RngCore + ?Sized>(params: &ModelParams, m: u64, rng: &mut R) -> Result<f64> {
    params.require_linear()?;
    if m == 0 {
        return Ok(0.0);
    }
    let (l, mu) = (params.lambda(), params.mu());
    // v = 1 - F_1(τ), where F_1(τ) = U^{1/m}
    let v = -(open_uniform(rng).ln() / m as f64).exp_m1();
    if params.regime() == Regime::Critical {
        return Ok((1.0 - v) / (l * v));
    }
    if l > mu && 1.0 - v >= mu / l {
        return Ok(f64::INFINITY);
    }
    let d = mu - l;
    Ok((d * (1.0 - v) / (mu * v)).ln_1p() / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{linear_extinction_prob, linear_tau0_cdf};
    use crate::sim::ks::{ks_critical_1pct, ks_statistic};
    use crate::sim::rng::replicate_rng;

    fn check(params: ModelParams, m: u64) {
        let mut rng = replicate_rng(31, m, 0);
        // finite draws follow F_1^m conditioned on extinction
        let mut xs: Vec<f64> = (0..10_000)
            .map(|_| sample_linear_extinction(&params, m, &mut rng).unwrap())
            .filter(|t| t.is_finite())
            .collect();
        xs.sort_by(f64::total_cmp);
        let total = linear_extinction_prob(&params, m).unwrap();
        let d = ks_statistic(&xs, |t| linear_tau0_cdf(&params, m, t).unwrap() / total);
        assert!(d < ks_critical_1pct(xs.len()), "{params} m={m}: KS {d}");
    }

    #[test]
    fn matches_closed_form_cdf() {
        check(ModelParams::linear(1.0, 2.0).unwrap(), 1);
        check(ModelParams::linear(1.0, 2.0).unwrap(), 50);
        check(ModelParams::linear(1.0, 1.0).unwrap(), 7);
        check(ModelParams::linear(2.0, 1.0).unwrap(), 2);
    }

    #[test]
    fn supercritical_survival_fraction() {
        let params = ModelParams::linear(2.0, 1.0).unwrap();
        let mut rng = replicate_rng(1, 0, 0);
        let n = 20_000;
        let dead = (0..n)
            .filter(|_| sample_linear_extinction(&params, 1, &mut rng).unwrap().is_finite())
            .count() as f64
            / n as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((dead - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn rejects_competition() {
        let mut rng = replicate_rng(1, 0, 0);
        let params = ModelParams::new(1.0, 1.0, 0.1).unwrap();
        assert!(sample_linear_extinction(&params, 3, &mut rng).is_err());
    }
}
