//! Model parameters, jump rates and the carrying capacity.

use std::fmt;

use crate::error::{Error, Result};

/// Reproduction regime of the underlying linear process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Birth rate `λ`, death rate `μ` and competition rate `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    mu: f64,
    theta: f64,
}

impl ModelParams {
    /// Requires `λ > 0`, `μ > 0`, `θ ≥ 0`, all finite.
    pub fn new(lambda: f64, mu: f64, theta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::parameter(format!("birth rate must be positive, got {lambda}")));
        }
        Self::with_birth_allowed_zero(lambda, mu, theta)
    }

    /// Linear process (`θ = 0`).
    pub fn linear(lambda: f64, mu: f64) -> Result<Self> {
        Self::new(lambda, mu, 0.0)
    }

    /// Pure death process (`λ = 0`). Only the simulators accept it; the
    /// weight-based formulas need `λ > 0`.
    pub fn pure_death(mu: f64, theta: f64) -> Result<Self> {
        Self::with_birth_allowed_zero(0.0, mu, theta)
    }

    fn with_birth_allowed_zero(lambda: f64, mu: f64, theta: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::parameter(format!("death rate must be positive, got {mu}")));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::parameter(format!(
                "competition rate must be non-negative, got {theta}"
            )));
        }
        Ok(Self { lambda, mu, theta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same `λ, μ` with a different competition rate.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::with_birth_allowed_zero(self.lambda, self.mu, theta)
    }

    pub fn regime(&self) -> Regime {
        if self.lambda < self.mu {
            Regime::Subcritical
        } else if self.lambda > self.mu {
            Regime::Supercritical
        } else {
            Regime::Critical
        }
    }

    pub fn is_linear(&self) -> bool {
        self.theta == 0.0
    }

    /// `λ_i = iλ`.
    pub fn birth_rate(&self, i: u64) -> f64 {
        i as f64 * self.lambda
    }

    /// `μ_i = iμ + i(i-1)θ`.
    pub fn death_rate(&self, i: u64) -> f64 {
        let i = i as f64;
        i * self.mu + i * (i - 1.0).max(0.0) * self.theta
    }

    /// `μ_i / λ_i = (μ + (i-1)θ) / λ` for `i ≥ 1`; the ratio `π_i / π_{i-1}`.
    pub fn death_birth_ratio(&self, i: u64) -> f64 {
        debug_assert!(i >= 1);
        (self.mu + (i - 1) as f64 * self.theta) / self.lambda
    }

    pub(crate) fn require_birth(&self) -> Result<()> {
        if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(Error::parameter("operation requires a positive birth rate"))
        }
    }

    pub(crate) fn require_linear(&self) -> Result<()> {
        if self.is_linear() {
            Ok(())
        } else {
            Err(Error::parameter(format!(
                "linear-process formula requires θ = 0, got θ = {}",
                self.theta
            )))
        }
    }

    pub(crate) fn require_competition(&self) -> Result<()> {
        if self.theta > 0.0 {
            Ok(())
        } else {
            Err(Error::parameter("operation requires θ > 0"))
        }
    }

    pub(crate) fn require_regime(&self, regime: Regime) -> Result<()> {
        if self.regime() == regime {
            Ok(())
        } else {
            Err(Error::regime(format!(
                "requires the {regime} regime, got {} (λ = {}, μ = {})",
                self.regime(),
                self.lambda,
                self.mu
            )))
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(λ={}, μ={}, θ={})", self.lambda, self.mu, self.theta)
    }
}

/// Carrying capacity `i_θ = ⌊(λ-μ)/θ⌋ + 1` of a supercritical process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Threshold(u64);

impl Threshold {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// When `(λ-μ)/θ` is an integer the drift `λ_i - μ_i` vanishes at `i_θ`
/// itself; it is strictly negative from `i_θ + 1` on in every case.
pub fn carrying_capacity(params: &ModelParams) -> Result<Threshold> {
    params.require_regime(Regime::Supercritical)?;
    params.require_competition()?;
    let ratio = (params.lambda - params.mu) / params.theta;
    if ratio >= u64::MAX as f64 {
        return Err(Error::parameter("carrying capacity exceeds the integer range"));
    }
    Ok(Threshold(ratio.floor() as u64 + 1))
}
