//! Exact quantities computed from the weight table.

pub mod crossing;
pub mod hitting;
pub mod linear;
pub mod series;

pub use crossing::{beta_down, beta_up, crossing_sum_identity, CrossingSums};
pub use hitting::{
    exit_probabilities, log_upcross_deficit, prob_down_before_up, prob_up_before_down, q_upcross, upcross_deficit,
    ExitProbabilities, HittingQuery,
};
pub use linear::{linear_extinction_prob, linear_subcritical_mean_asymptote, linear_tau0_cdf};
pub use series::{
    excursion_decomposition, excursion_mean, expected_absorption, expected_step_down, ExcursionDecomposition,
    SeriesResult, DEFAULT_REL_TOL,
};
