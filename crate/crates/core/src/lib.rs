//! Extinction-time analysis for the birth-death process with competition.
//!
//! From state `i` the process jumps up at rate `iλ` and down at rate
//! `iμ + i(i-1)θ`. The crate covers four layers:
//!
//! * [`model`] and [`weights`]: parameters, rates, the carrying capacity and
//!   the log-domain `π_j` / `Π_k` weight table every exact formula is built on.
//! * [`exact`]: hitting probabilities, conditional crossing times, expected
//!   absorption times and the linear (`θ = 0`) closed forms.
//! * [`asymptotics`]: small-`θ` predictions for all three regimes, limit
//!   laws, the `π_j` approximation and the deterministic fluid limit.
//! * [`sim`]: exact jump simulation, the monotone coupling with the linear
//!   process, reproducible replicate streams and goodness-of-fit statistics.

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod model;
pub mod numerics;
pub mod sim;
pub mod weights;

pub use error::{Error, Result};
pub use model::{ModelParams, Regime, Threshold};
pub use weights::WeightTable;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
