//! Exact simulation and estimators.
//!
//! All samplers draw from [`rng::replicate_rng`] streams, so every report is
//! reproducible from the master seed, the grid index and the replicate count.

pub mod coupling;
pub mod estimate;
pub mod fluid;
pub mod ks;
pub mod linear;
pub mod path;
pub mod rng;

pub use coupling::{
    conditioned_sample, sample_coupled, sample_coupled_with, separation_probability, survival_level, Condition,
    ConditionedSample, CouplingSample, SeparationEstimate,
};
pub use estimate::{estimate, run_replicates, EstimatorReport};
pub use fluid::fluid_sup_deviation;
pub use ks::{ks_critical_1pct, ks_statistic, ks_two_sample, ks_two_sample_critical_1pct};
pub use linear::sample_linear_extinction;
pub use path::{sample_extinction, sample_extinction_with, PathSample, SimConfig, Walker};
pub use rng::{replicate_rng, RNG_ALGORITHM};
