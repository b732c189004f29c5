use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::weights::WeightTable;

/// Start `i` strictly between a lower level `k` and an upper level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingQuery {
    start: usize,
    upper: usize,
    lower: usize,
}

impl HittingQuery {
    pub fn new(start: usize, upper: usize, lower: usize) -> Result<Self> {
        if lower < start && start < upper {
            Ok(Self { start, upper, lower })
        } else {
            Err(Error::query(format!(
                "need lower < start < upper, got lower={lower}, start={start}, upper={upper}"
            )))
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn upper(&self) -> usize {
        self.upper
    }

    pub fn lower(&self) -> usize {
        self.lower
    }
}

/// The two exit probabilities of a [`HittingQuery`]. They always sum to one:
/// the smaller is computed from the weights and the larger as its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitProbabilities {
    pub up: f64,
    pub down: f64,
}

impl WeightTable {
    /// `Q_i = Π_i / Π_{i+1}`: probability of reaching `i+1` before `0` from `i`.
    pub fn q_upcross(&self, i: usize) -> f64 {
        self.log_cum_ratio(i, i + 1).exp()
    }

    /// `ln(1 - Q_i) = ln(π_i / Π_{i+1})`.
    pub fn log_upcross_deficit(&self, i: usize) -> f64 {
        -self.log_cum_over_pi(i + 1, i)
    }

    pub fn exit_probabilities(&self, q: &HittingQuery) -> ExitProbabilities {
        let (k, i, n) = (q.lower, q.start, q.upper);
        let total = self.log_range_over_pi(k, n, i);
        let log_up = self.log_range_over_pi(k, i, i) - total;
        let log_down = self.log_range_over_pi(i, n, i) - total;
        if log_up <= log_down {
            let up = log_up.exp();
            ExitProbabilities { up, down: 1.0 - up }
        } else {
            let down = log_down.exp();
            ExitProbabilities { up: 1.0 - down, down }
        }
    }
}

fn table_for(params: &ModelParams, max_index: usize) -> Result<WeightTable> {
    WeightTable::new(params, max_index)
}

/// Probability of reaching `i + 1` before absorption at `0`, starting at `i ≥ 1`.
pub fn q_upcross(params: &ModelParams, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::query("q_upcross needs i ≥ 1"));
    }
    Ok(table_for(params, i)?.q_upcross(i))
}

/// `1 - Q_i`, evaluated without cancellation.
pub fn upcross_deficit(params: &ModelParams, i: usize) -> Result<f64> {
    Ok(log_upcross_deficit(params, i)?.exp())
}

pub fn log_upcross_deficit(params: &ModelParams, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::query("upcross deficit needs i ≥ 1"));
    }
    Ok(table_for(params, i)?.log_upcross_deficit(i))
}

/// `(Π_i - Π_k) / (Π_n - Π_k)`.
pub fn prob_up_before_down(params: &ModelParams, q: &HittingQuery) -> Result<f64> {
    Ok(exit_probabilities(params, q)?.up)
}

/// `(Π_n - Π_i) / (Π_n - Π_k)`.
pub fn prob_down_before_up(params: &ModelParams, q: &HittingQuery) -> Result<f64> {
    Ok(exit_probabilities(params, q)?.down)
}

pub fn exit_probabilities(params: &ModelParams, q: &HittingQuery) -> Result<ExitProbabilities> {
    Ok(table_for(params, q.upper)?.exit_probabilities(q))
}
