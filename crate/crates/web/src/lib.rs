//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the page slices it back into
//! series. The `*_series` functions hold the logic and are plain Rust so they
//! can be tested natively.

use wasm_bindgen::prelude::*;

use logistic_bd::asymptotics::{critical_mean, predict, subcritical_mean, supercritical_mean, FluidCurve};
use logistic_bd::exact::{expected_absorption, DEFAULT_REL_TOL};
use logistic_bd::model::carrying_capacity;
use logistic_bd::sim::{replicate_rng, run_replicates, sample_extinction_with, SimConfig, Walker};
use logistic_bd::{ModelParams, Regime, Result};

/// Interleaved `(t, x(t), t_k, θX(t_k))`: the fluid curve on a regular grid of
/// `points` times, then one simulated path from `m = round(a/θ)` until
/// `horizon`, both padded to the same length with the last value.
pub fn fluid_and_path_series(
    lambda: f64,
    mu: f64,
    theta: f64,
    a: f64,
    horizon: f64,
    points: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let params = ModelParams::new(lambda, mu, theta)?;
    let curve = FluidCurve::new(&params, a)?;
    let fluid: Vec<(f64, f64)> = (0..points.max(2))
        .map(|k| {
            let t = horizon * k as f64 / (points.max(2) - 1) as f64;
            (t, curve.x(t))
        })
        .collect();
    let mut walker = Walker::new(params, (a / theta).round() as u64);
    let mut rng = replicate_rng(seed, 0, 0);
    let mut path = vec![(0.0, theta * walker.state() as f64)];
    while walker.time() < horizon && walker.step(&mut rng).is_some() {
        path.push((walker.time().min(horizon), theta * walker.state() as f64));
    }
    let n = fluid.len().max(path.len());
    let at = |s: &[(f64, f64)], k: usize| s[k.min(s.len() - 1)];
    Ok((0..n)
        .flat_map(|k| {
            let (f, p) = (at(&fluid, k), at(&path, k));
            [f.0, f.1, p.0, p.1]
        })
        .collect())
}

/// Interleaved `(τ_(k), F̂(τ_(k)), F(τ_(k)))`: sorted simulated extinction
/// times, their empirical CDF and the limit-law CDF at the same times.
pub fn ecdf_and_law_series(lambda: f64, mu: f64, theta: f64, m: u64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let params = ModelParams::new(lambda, mu, theta)?;
    let pred = predict(&params, theta * m as f64)?;
    let scale = match params.regime() {
        Regime::Supercritical => expected_absorption(&params, m as usize, DEFAULT_REL_TOL)?.value,
        _ => pred.scale,
    };
    let cfg = SimConfig::new(params, m, seed);
    let mut taus = run_replicates(seed, 0, n, |rng| sample_extinction_with(&cfg, rng).tau);
    taus.sort_by(f64::total_cmp);
    let nf = taus.len() as f64;
    Ok(taus
        .iter()
        .enumerate()
        .flat_map(|(k, &t)| {
            let law = match pred.law {
                Some(law) => law.cdf((t - pred.shift) / scale),
                None => f64::NAN,
            };
            [t, (k + 1) as f64 / nf, law]
        })
        .collect())
}

/// Interleaved `(θ, exact, asymptotic)` expected extinction times. The start
/// is the carrying capacity above criticality and `round(a/θ)` otherwise.
pub fn mean_over_theta_series(lambda: f64, mu: f64, a: f64, thetas: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(3 * thetas.len());
    for &th in thetas {
        let params = ModelParams::new(lambda, mu, th)?;
        let (m, asym) = match params.regime() {
            Regime::Supercritical => (carrying_capacity(&params)?.get(), supercritical_mean(&params)?.value),
            Regime::Subcritical => ((a / th).round() as u64, subcritical_mean(&params, a)?),
            Regime::Critical => ((a / th).round() as u64, critical_mean(&params)?),
        };
        let exact = expected_absorption(&params, m as usize, DEFAULT_REL_TOL)?.value;
        out.extend([th, exact, asym]);
    }
    Ok(out)
}

fn js(r: Result<Vec<f64>>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn fluid_and_path(
    lambda: f64,
    mu: f64,
    theta: f64,
    a: f64,
    horizon: f64,
    points: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    js(fluid_and_path_series(lambda, mu, theta, a, horizon, points, seed))
}

#[wasm_bindgen]
pub fn ecdf_and_law(lambda: f64, mu: f64, theta: f64, m: u64, n: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    js(ecdf_and_law_series(lambda, mu, theta, m, n, seed))
}

#[wasm_bindgen]
pub fn mean_over_theta(lambda: f64, mu: f64, a: f64, thetas: Vec<f64>) -> Result<Vec<f64>, JsError> {
    js(mean_over_theta_series(lambda, mu, a, &thetas))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_starts_on_the_curve() {
        let s = fluid_and_path_series(1.0, 2.0, 0.01, 1.0, 2.0, 50, 3).unwrap();
        assert_eq!(s.len() % 4, 0);
        assert_eq!((s[0], s[1], s[2], s[3]), (0.0, 1.0, 0.0, 1.0));
        let last = &s[s.len() - 4..];
        assert_eq!(last[0], 2.0);
        assert!(last[2] <= 2.0);
    }

    #[test]
    fn ecdf_ends_at_one_and_law_is_a_cdf() {
        let s = ecdf_and_law_series(1.0, 2.0, 0.01, 100, 200, 1).unwrap();
        assert_eq!(s.len(), 600);
        assert_eq!(s[s.len() - 2], 1.0);
        let law: Vec<f64> = s.chunks(3).map(|c| c[2]).collect();
        assert!(law.windows(2).all(|w| w[0] <= w[1]) && law.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn supercritical_ratio_tends_to_one() {
        let s = mean_over_theta_series(2.0, 1.0, 1.0, &[0.1, 0.02]).unwrap();
        let r: Vec<f64> = s.chunks(3).map(|c| (c[1] / c[2] - 1.0).abs()).collect();
        assert!(r[1] < r[0]);
        assert!(mean_over_theta_series(1.0, 1.0, 1.0, &[0.0]).is_err());
    }
}
