//! Deterministic limit of `θX_θ(t)`: `x' = (λ-μ)x - x²`, `x(0) = a`.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};

pub const DEFAULT_DESCENT_ALPHA: f64 = 0.25;

/// Solution of the fluid equation from `x(0) = a`. Needs `λ ≠ μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidCurve {
    params: ModelParams,
    a: f64,
}

impl FluidCurve {
    pub fn new(params: &ModelParams, a: f64) -> Result<Self> {
        if params.regime() == Regime::Critical {
            return Err(Error::parameter("fluid solution is defined for λ ≠ μ only"));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::parameter(format!(
                "initial scaled size must be positive, got {a}"
            )));
        }
        Ok(Self { params: *params, a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn d(&self) -> f64 {
        self.params.mu() - self.params.lambda()
    }

    /// `1/x(t) = e^{dt}/a + (e^{dt} - 1)/d` with `d = μ - λ`.
    pub fn x(&self, t: f64) -> f64 {
        let d = self.d();
        let e = (d * t).exp();
        let inv = e / self.a + (d * t).exp_m1() / d;
        1.0 / inv
    }

    /// `h(z, t) = t - [ln(d+z) - ln z + ln a - ln(d+a)] / d`.
    ///
    /// Defined when `d + z` and `d + a` have the same sign, i.e. when `z`
    /// lies on the same side of the equilibrium `λ - μ` as `a`.
    pub fn h(&self, z: f64, t: f64) -> Result<f64> {
        let (d, a) = (self.d(), self.a);
        if z.is_nan() || z <= 0.0 {
            return Err(Error::parameter(format!("h needs z > 0, got {z}")));
        }
        let (dz, da) = (d + z, d + a);
        if dz == 0.0 || da == 0.0 || dz.signum() != da.signum() {
            return Err(Error::parameter(format!(
                "z = {z} and a = {a} lie on different sides of the equilibrium {}",
                -d
            )));
        }
        Ok(t - ((dz / da).ln() + (a / z).ln()) / d)
    }
}

pub fn fluid_solution(params: &ModelParams, a: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::parameter(format!("time must be non-negative, got {t}")));
    }
    Ok(FluidCurve::new(params, a)?.x(t))
}

pub fn hxt_integral(params: &ModelParams, a: f64, z: f64, t: f64) -> Result<f64> {
    FluidCurve::new(params, a)?.h(z, t)
}

/// Time for the subcritical fluid curve to fall to `θ^{1-α}`, to leading order:
/// `[(1-α) ln(1/θ) - ln(1/a + 1/(μ-λ))] / (μ-λ)`.
pub fn descent_time(params: &ModelParams, a: f64, alpha: f64) -> Result<f64> {
    params.require_regime(Regime::Subcritical)?;
    params.require_competition()?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::parameter(format!("α must lie in (0, 1/2), got {alpha}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::parameter(format!(
            "initial scaled size must be positive, got {a}"
        )));
    }
    let d = params.mu() - params.lambda();
    Ok(((1.0 - alpha) * (1.0 / params.theta()).ln() - (1.0 / a + 1.0 / d).ln()) / d)
}
