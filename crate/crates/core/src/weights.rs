//! The weights `π_0 = 1`, `π_j = (μ_1⋯μ_j)/(λ_1⋯λ_j)` and their partial
//! sums `Π_k = π_0 + ⋯ + π_{k-1}`, held entirely in the log domain.
//!
//! `ln π_j` is accumulated as an unevaluated double-double (`hi + lo`), so
//! differences `ln(π_a/π_b)` stay accurate to the last bit even when
//! `|ln π_j|` is in the hundreds of thousands. Each partial sum is stored as
//! an anchor index (the largest weight summed so far) and the compensated sum
//! of the weights scaled by that anchor, so `Π_k / π_r` is available without
//! ever forming `π_j` itself. `Π_0 = 0` is an empty sum whose logarithm is the
//! exact sentinel [`LOG_ZERO`].

use crate::error::Result;
use crate::model::ModelParams;
use crate::numerics::{log1m_exp, two_sum, CompensatedSum};

/// Logarithm of zero.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// A sum of weights `Σ_{j∈S} π_j` over an index set, anchored at its largest
/// member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiSum {
    anchor: usize,
    scaled: CompensatedSum,
}

impl Default for PiSum {
    fn default() -> Self {
        Self::empty()
    }
}

impl PiSum {
    pub fn empty() -> Self {
        Self {
            anchor: usize::MAX,
            scaled: CompensatedSum::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.anchor == usize::MAX
    }

    /// `ln(S / π_r)`.
    pub fn log_over_pi(&self, table: &WeightTable, r: usize) -> f64 {
        if self.is_empty() {
            LOG_ZERO
        } else {
            table.log_pi_ratio(self.anchor, r) + self.scaled.value().ln()
        }
    }

    /// `ln(S / T)` for another sum `T`.
    pub fn log_ratio(&self, other: &PiSum, table: &WeightTable) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, _) => LOG_ZERO,
            (false, true) => f64::INFINITY,
            _ => table.log_pi_ratio(self.anchor, other.anchor) + self.scaled.value().ln() - other.scaled.value().ln(),
        }
    }
}

/// Log-domain table of `π_j` (for `j = 0..=J`) and `Π_k` (for `k = 0..=J+1`).
#[derive(Debug, Clone)]
pub struct WeightTable {
    params: ModelParams,
    log_pi_hi: Vec<f64>,
    log_pi_lo: Vec<f64>,
    cum: Vec<PiSum>,
}

/// Build the table up to index `max_index`. Requires `λ > 0`.
pub fn build_weights(params: &ModelParams, max_index: usize) -> Result<WeightTable> {
    WeightTable::new(params, max_index)
}

impl WeightTable {
    pub fn new(params: &ModelParams, max_index: usize) -> Result<Self> {
        params.require_birth()?;
        let mut table = Self {
            params: *params,
            log_pi_hi: vec![0.0],
            log_pi_lo: vec![0.0],
            cum: vec![PiSum::empty()],
        };
        let mut first = PiSum::empty();
        table.push_into(&mut first, 0);
        table.cum.push(first);
        table.extend_to(max_index);
        Ok(table)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Largest `j` with `π_j` stored; `Π_k` is available for `k ≤ max_index() + 1`.
    pub fn max_index(&self) -> usize {
        self.log_pi_hi.len() - 1
    }

    /// Grow the table so that `π_j` is stored for `j ≤ max_index`.
    pub fn extend_to(&mut self, max_index: usize) {
        let current = self.max_index();
        if max_index <= current {
            return;
        }
        let extra = max_index - current;
        self.log_pi_hi.reserve(extra);
        self.log_pi_lo.reserve(extra);
        self.cum.reserve(extra);
        for j in current + 1..=max_index {
            let term = self.params.death_birth_ratio(j as u64).ln();
            let (s, e) = two_sum(self.log_pi_hi[j - 1], term);
            let (hi, lo) = fast_two_sum(s, self.log_pi_lo[j - 1] + e);
            self.log_pi_hi.push(hi);
            self.log_pi_lo.push(lo);
            let mut next = self.cum[j];
            self.push_into(&mut next, j);
            self.cum.push(next);
        }
    }

    /// Make sure index `j` is stored, doubling the table when it is not.
    pub fn ensure(&mut self, j: usize) {
        if j > self.max_index() {
            self.extend_to(j.max(2 * self.max_index()));
        }
    }

    /// Add `π_j` to a running sum.
    pub fn push_into(&self, sum: &mut PiSum, j: usize) {
        if sum.is_empty() {
            sum.anchor = j;
            sum.scaled = CompensatedSum::new();
            sum.scaled.add(1.0);
            return;
        }
        let d = self.log_pi_ratio(j, sum.anchor);
        if d > 0.0 {
            sum.scaled.scale((-d).exp());
            sum.scaled.add(1.0);
            sum.anchor = j;
        } else {
            sum.scaled.add(d.exp());
        }
    }

    pub fn log_pi(&self, j: usize) -> f64 {
        self.log_pi_hi[j] + self.log_pi_lo[j]
    }

    /// `ln(π_a / π_b)`, accurate to double precision irrespective of the size
    /// of `ln π_a` and `ln π_b`.
    #[inline]
    pub fn log_pi_ratio(&self, a: usize, b: usize) -> f64 {
        (self.log_pi_hi[a] - self.log_pi_hi[b]) + (self.log_pi_lo[a] - self.log_pi_lo[b])
    }

    /// `Π_k` as a sum; empty for `k = 0`.
    pub fn cum(&self, k: usize) -> &PiSum {
        &self.cum[k]
    }

    /// `ln Π_k`, [`LOG_ZERO`] for `k = 0`.
    pub fn log_cum(&self, k: usize) -> f64 {
        let s = &self.cum[k];
        if s.is_empty() {
            LOG_ZERO
        } else {
            self.log_pi(s.anchor) + s.scaled.value().ln()
        }
    }

    /// `ln(Π_k / π_r)`.
    pub fn log_cum_over_pi(&self, k: usize, r: usize) -> f64 {
        self.cum[k].log_over_pi(self, r)
    }

    /// `ln(Π_a / Π_b)`.
    pub fn log_cum_ratio(&self, a: usize, b: usize) -> f64 {
        self.cum[a].log_ratio(&self.cum[b], self)
    }

    /// `ln((Π_n - Π_k) / π_r)` for `k ≤ n`, i.e. the log of
    /// `Σ_{j=k}^{n-1} π_j / π_r`. Differences of stored partial sums are used
    /// only when `Π_k ≤ Π_n / 2`; otherwise the range is summed directly.
    pub fn log_range_over_pi(&self, k: usize, n: usize, r: usize) -> f64 {
        debug_assert!(k <= n);
        if k == n {
            return LOG_ZERO;
        }
        if k == 0 {
            return self.log_cum_over_pi(n, r);
        }
        let ratio = self.log_cum_ratio(k, n);
        if ratio <= -std::f64::consts::LN_2 {
            self.log_cum_over_pi(n, r) + log1m_exp(ratio)
        } else {
            self.range_sum(k, n).log_over_pi(self, r)
        }
    }

    /// `Σ_{j=k}^{n-1} π_j` summed term by term.
    pub fn range_sum(&self, k: usize, n: usize) -> PiSum {
        let mut s = PiSum::empty();
        for j in k..n {
            self.push_into(&mut s, j);
        }
        s
    }

    /// `π_j` in linear scale; overflows to `+∞` or underflows to zero when
    /// out of range.
    pub fn pi(&self, j: usize) -> f64 {
        self.log_pi(j).exp()
    }

    /// `Π_k` in linear scale.
    pub fn cum_value(&self, k: usize) -> f64 {
        self.log_cum(k).exp()
    }

    pub fn log_pi_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.max_index()).map(|j| self.log_pi(j))
    }

    pub fn log_cum_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cum.len()).map(|k| self.log_cum(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(l: f64, m: f64, t: f64, j: usize) -> WeightTable {
        build_weights(&ModelParams::new(l, m, t).unwrap(), j).unwrap()
    }

    #[test]
    fn small_table_by_hand() {
        let t = table(1.0, 2.0, 0.5, 2);
        let pis: Vec<f64> = (0..=2).map(|j| t.pi(j)).collect();
        for (got, want) in pis.iter().zip([1.0, 2.0, 5.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert_eq!(t.log_pi(0), 0.0);
        assert_eq!(t.log_cum(0), LOG_ZERO);
        assert!((t.cum_value(3) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn critical_linear_cum_is_index() {
        let t = table(1.0, 1.0, 0.0, 3);
        assert!((t.cum_value(3) - 3.0).abs() < 1e-15);
        for k in 0..=4 {
            assert!((t.cum_value(k) - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn cum_strictly_increasing() {
        let t = table(2.0, 1.0, 0.01, 5000);
        for k in 0..=5000 {
            assert!(t.log_cum_ratio(k + 1, k) > 0.0, "k={k}");
        }
    }

    #[test]
    fn ratio_recurrence_survives_long_accumulation() {
        for &(l, m, th) in &[(2.0, 1.0, 0.001), (2.0, 1.0, 0.1), (1.0, 2.0, 0.1), (1.0, 1.0, 0.0)] {
            let params = ModelParams::new(l, m, th).unwrap();
            let t = build_weights(&params, 100_000).unwrap();
            for j in 1..=100_000usize {
                let got = t.log_pi_ratio(j, j - 1).exp();
                let want = (m + (j - 1) as f64 * th) / l;
                assert!(((got - want) / want).abs() < 1e-12, "{params} j={j}");
            }
        }
    }

    #[test]
    fn no_overflow_for_small_theta() {
        // π_j dips to e^{-c2/θ} and later grows superexponentially.
        let t = table(2.0, 1.0, 0.001, 1_000_000);
        assert!(t.log_pi(1000) < -300.0);
        assert!(t.log_pi(1_000_000).is_finite() && t.log_pi(1_000_000) > 1e6);
        assert!(t.log_cum(1_000_001).is_finite());
        let it = 1001;
        // Π_{i+1} - Π_i = π_i is far below the resolution of Π itself
        let direct = t.log_range_over_pi(it, it + 1, it);
        assert!(direct.abs() < 1e-15);
    }

    #[test]
    fn range_sum_agrees_with_difference() {
        let t = table(1.0, 2.0, 0.05, 200);
        for (k, n) in [(1, 5), (3, 100), (50, 51), (0, 10)] {
            let a = t.log_range_over_pi(k, n, 7);
            let b = t.range_sum(k, n).log_over_pi(&t, 7);
            assert!((a - b).abs() < 1e-12, "{k} {n}");
        }
    }

    #[test]
    fn extension_matches_fresh_build() {
        let params = ModelParams::new(1.7, 1.1, 0.02).unwrap();
        let mut grown = build_weights(&params, 10).unwrap();
        grown.extend_to(400);
        let fresh = build_weights(&params, 400).unwrap();
        for k in 0..=401 {
            assert_eq!(grown.log_cum(k), fresh.log_cum(k));
        }
    }

    #[test]
    fn pure_death_rejected() {
        let params = ModelParams::pure_death(1.0, 0.0).unwrap();
        assert!(build_weights(&params, 5).is_err());
    }
}
