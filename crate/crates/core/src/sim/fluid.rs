use rand_chacha::rand_core::RngCore;

use super::path::Walker;
use crate::asymptotics::FluidCurve;
use crate::error::Result;
use crate::model::ModelParams;

/// `sup_{t ≤ horizon} |θX_θ(t) - x(t)|` along one path from `m0`, where `x`
/// is the fluid curve from `a = θ m0`.
///
/// The path is constant between jumps and `x` is monotone, so the supremum
/// over each holding interval is attained at one of its ends.
pub fn fluid_sup_deviation<R: RngCore + ?Sized>(
    params: &ModelParams,
    m0: u64,
    horizon: f64,
    rng: &mut R,
) -> Result<f64> {
    params.require_competition()?;
    let th = params.theta();
    let curve = FluidCurve::new(params, th * m0 as f64)?;
    let mut walker = Walker::new(*params, m0);
    let mut sup = 0.0f64;
    loop {
        let (start, level) = (walker.time(), th * walker.state() as f64);
        let end = match walker.step(rng) {
            Some(_) => walker.time().min(horizon),
            None => horizon,
        };
        sup = sup
            .max((level - curve.x(start)).abs())
            .max((level - curve.x(end)).abs());
        if end >= horizon {
            return Ok(sup);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::replicate_rng;

    #[test]
    fn deviation_is_small_for_large_populations() {
        let params = ModelParams::new(1.0, 2.0, 0.001).unwrap();
        let mut rng = replicate_rng(2, 0, 0);
        let d = fluid_sup_deviation(&params, 1000, 3.0, &mut rng).unwrap();
        assert!(d > 0.0 && d < 0.1, "{d}");
        assert!(fluid_sup_deviation(&params.with_theta(0.0).unwrap(), 10, 1.0, &mut rng).is_err());
    }
}
