//! Conditional crossing times.
//!
//! `β_i^k` is the expected time to go from `i` to `i+1` given that `i+1` is
//! reached before `k`; `β_k^{i+1}` the expected time to go from `k` to `k-1`
//! given that `k-1` is reached before `i+1`. Both are evaluated with their
//! first-step difference equations, so a whole sequence costs `O(length)`.
//! Every ratio of partial sums is taken relative to a local weight, which
//! keeps the recursions free of overflow and cancellation.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::LogSum;
use crate::weights::{PiSum, WeightTable};

/// First-moment form of the crossing-time identity for a window `(u, v]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSums {
    /// `Σ_{i=u+1}^{v} β_i^u`.
    pub sum_up: f64,
    /// `Σ_{k=u+1}^{v} β_k^{v+1}`.
    pub sum_down: f64,
    /// `Σ_j (Π_{v+1}-Π_j)(Π_j-Π_u) / (λ_j π_j (Π_{v+1}-Π_u))`.
    pub closed_form: f64,
}

impl CrossingSums {
    /// Largest pairwise relative discrepancy among the three values.
    pub fn max_relative_gap(&self) -> f64 {
        let vals = [self.sum_up, self.sum_down, self.closed_form];
        let scale = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let spread =
            vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        spread / scale
    }
}

impl WeightTable {
    /// `β_i^k` for `i = k+1..=v`. Needs `π_v` stored.
    pub fn beta_up_sequence(&self, k: usize, v: usize) -> Vec<f64> {
        assert!(k < v && v <= self.max_index(), "need k < v ≤ table size");
        let p = *self.params();
        let mut out = Vec::with_capacity(v - k);
        let mut at = PiSum::empty(); // Π_i - Π_k
        self.push_into(&mut at, k);
        let first = (k + 1) as u64;
        let mut beta = 1.0 / (p.birth_rate(first) + p.death_rate(first));
        out.push(beta);
        for i in k + 1..v {
            let below = at;
            self.push_into(&mut at, i);
            let i1 = i + 1;
            let mut above = at;
            self.push_into(&mut above, i1);
            // `at` holds Π_{i1} - Π_k, `below` Π_{i1-1} - Π_k, `above` Π_{i1+1} - Π_k
            let rate_up = p.birth_rate(i1 as u64);
            let l_above = above.log_over_pi(self, i1);
            let direct = (at.log_over_pi(self, i1) - l_above).exp() / rate_up;
            let carry = p.death_birth_ratio(i1 as u64) * (below.log_over_pi(self, i1) - l_above).exp();
            beta = direct + carry * beta;
            out.push(beta);
        }
        out
    }

    /// `β_k^{v+1}` for `k = u+1..=v`, in increasing `k`. Needs `π_v` stored.
    pub fn beta_down_sequence(&self, u: usize, v: usize) -> Vec<f64> {
        assert!(u < v && v <= self.max_index(), "need u < v ≤ table size");
        let p = *self.params();
        let mut out = vec![0.0; v - u];
        let mut at = PiSum::empty(); // Π_{v+1} - Π_l
        self.push_into(&mut at, v);
        let mut beta = 1.0 / (p.birth_rate(v as u64) + p.death_rate(v as u64));
        out[v - u - 1] = beta;
        for l in (u + 1..v).rev() {
            let above = at;
            self.push_into(&mut at, l);
            let mut below = at;
            self.push_into(&mut below, l - 1);
            let lu = l as u64;
            let rate_down = p.death_rate(lu);
            let l_below = below.log_over_pi(self, l);
            let direct = (at.log_over_pi(self, l) - l_below).exp() / rate_down;
            let carry = (p.birth_rate(lu) / rate_down) * (above.log_over_pi(self, l) - l_below).exp();
            beta = direct + carry * beta;
            out[l - u - 1] = beta;
        }
        out
    }

    pub fn crossing_sums(&self, u: usize, v: usize) -> CrossingSums {
        assert!(u < v && v <= self.max_index());
        let p = *self.params();
        let sum_up: f64 = self.beta_up_sequence(u, v).iter().sum();
        let sum_down: f64 = self.beta_down_sequence(u, v).iter().sum();

        // tails[j - u - 1] = Π_{v+1} - Π_j for j = u+1..=v
        let mut tails = vec![PiSum::empty(); v - u];
        let mut tail = PiSum::empty();
        for j in (u + 1..=v).rev() {
            self.push_into(&mut tail, j);
            tails[j - u - 1] = tail;
        }
        let mut total = tail;
        self.push_into(&mut total, u);

        let mut head = PiSum::empty(); // Π_j - Π_u
        let mut acc = LogSum::new();
        for j in u + 1..=v {
            self.push_into(&mut head, j - 1);
            acc.push(
                tails[j - u - 1].log_over_pi(self, j) + head.log_over_pi(self, j)
                    - p.birth_rate(j as u64).ln()
                    - total.log_over_pi(self, j),
            );
        }
        CrossingSums {
            sum_up,
            sum_down,
            closed_form: acc.ln().exp(),
        }
    }
}

/// `β_i^k`: expected time from `i` to `i+1` given `i+1` is reached before `k < i`.
pub fn beta_up(params: &ModelParams, i: usize, k: usize) -> Result<f64> {
    if k >= i {
        return Err(Error::query(format!("beta_up needs k < i, got k={k}, i={i}")));
    }
    let table = WeightTable::new(params, i)?;
    Ok(*table.beta_up_sequence(k, i).last().expect("non-empty"))
}

/// `β_k^{ceiling}`: expected time from `k` to `k-1` given `k-1` is reached
/// before `ceiling`, with `1 ≤ k < ceiling`.
pub fn beta_down(params: &ModelParams, k: usize, ceiling: usize) -> Result<f64> {
    if k == 0 || k >= ceiling {
        return Err(Error::query(format!(
            "beta_down needs 1 ≤ k < ceiling, got k={k}, ceiling={ceiling}"
        )));
    }
    let v = ceiling - 1;
    let table = WeightTable::new(params, v)?;
    Ok(table.beta_down_sequence(k - 1, v)[0])
}

/// Both crossing-time sums and their closed form over the window `(u, v]`.
pub fn crossing_sum_identity(params: &ModelParams, u: usize, v: usize) -> Result<CrossingSums> {
    if u >= v {
        return Err(Error::query(format!("need u < v, got u={u}, v={v}")));
    }
    Ok(WeightTable::new(params, v)?.crossing_sums(u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(l: f64, m: f64, t: f64) -> ModelParams {
        ModelParams::new(l, m, t).unwrap()
    }

    /// Plain double-sum evaluation of the closed forms, for moderate
    /// parameters only.
    struct Direct {
        lam: Vec<f64>,
        pi: Vec<f64>,
        cum: Vec<f64>,
    }

    impl Direct {
        fn new(l: f64, m: f64, t: f64, n: usize) -> Self {
            let mut pi = vec![1.0];
            let mut lam = vec![0.0];
            for j in 1..=n {
                let jf = j as f64;
                lam.push(jf * l);
                let mu_j = jf * m + jf * (jf - 1.0) * t;
                pi.push(pi[j - 1] * mu_j / (jf * l));
            }
            let mut cum = vec![0.0];
            for j in 0..=n {
                cum.push(cum[j] + pi[j]);
            }
            Self { lam, pi, cum }
        }

        fn beta_up(&self, i: usize, k: usize) -> f64 {
            let c = &self.cum;
            let s: f64 = (k + 1..=i)
                .map(|j| (c[j] - c[k]).powi(2) / (self.lam[j] * self.pi[j]))
                .sum();
            self.pi[i] / ((c[i] - c[k]) * (c[i + 1] - c[k])) * s
        }

        fn beta_down(&self, k: usize, i: usize) -> f64 {
            let c = &self.cum;
            let s: f64 = (k..=i)
                .map(|j| (c[i + 1] - c[j]).powi(2) / (self.lam[j] * self.pi[j]))
                .sum();
            self.pi[k - 1] / ((c[i + 1] - c[k - 1]) * (c[i + 1] - c[k])) * s
        }
    }

    #[test]
    fn boundary_values() {
        assert!((beta_up(&p(1.0, 1.0, 0.0), 1, 0).unwrap() - 0.5).abs() < 1e-15);
        assert!((beta_up(&p(1.0, 2.0, 0.0), 1, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((beta_down(&p(1.0, 1.0, 0.0), 2, 3).unwrap() - 0.25).abs() < 1e-15);
        assert!((beta_down(&p(1.0, 2.0, 0.5), 1, 2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_windows() {
        assert!(beta_up(&p(1.0, 1.0, 0.0), 2, 2).is_err());
        assert!(beta_down(&p(1.0, 1.0, 0.0), 0, 3).is_err());
        assert!(beta_down(&p(1.0, 1.0, 0.0), 3, 3).is_err());
        assert!(crossing_sum_identity(&p(1.0, 1.0, 0.0), 4, 4).is_err());
    }

    #[test]
    fn recursions_match_closed_forms() {
        for &(l, m, t) in &[(1.0, 1.0, 0.0), (1.0, 2.0, 0.1), (2.0, 1.0, 0.1), (1.3, 0.9, 0.02)] {
            let d = Direct::new(l, m, t, 40);
            let params = p(l, m, t);
            for k in [0usize, 1, 5] {
                for i in k + 1..30 {
                    let got = beta_up(&params, i, k).unwrap();
                    let want = d.beta_up(i, k);
                    assert!(((got - want) / want).abs() < 1e-12, "{params} up i={i} k={k}");
                }
            }
            for i in [1usize, 4, 25] {
                for k in 1..=i {
                    let got = beta_down(&params, k, i + 1).unwrap();
                    let want = d.beta_down(k, i);
                    assert!(((got - want) / want).abs() < 1e-12, "{params} down k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn single_term_identity() {
        let s = crossing_sum_identity(&p(1.0, 1.0, 0.0), 0, 1).unwrap();
        for v in [s.sum_up, s.sum_down, s.closed_form] {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_subcritical_with_competition() {
        let s = crossing_sum_identity(&p(1.0, 2.0, 0.1), 0, 5).unwrap();
        assert!(s.max_relative_gap() < 1e-9, "{s:?}");
    }

    #[test]
    fn sequences_stay_finite_at_small_theta() {
        let params = p(2.0, 1.0, 0.001);
        let table = WeightTable::new(&params, 3000).unwrap();
        let s = table.crossing_sums(0, 2500);
        assert!(s.sum_up.is_finite() && s.sum_down.is_finite());
        assert!(s.max_relative_gap() < 1e-9, "{s:?}");
    }

    proptest! {
        #[test]
        fn three_way_identity(
            l in 0.2f64..3.0, m in 0.2f64..3.0, th in prop::sample::select(vec![0.0, 0.001, 0.05, 0.5]),
            u in 0usize..200, w in 1usize..300,
        ) {
            let s = crossing_sum_identity(&p(l, m, th), u, u + w).unwrap();
            prop_assert!(s.max_relative_gap() < 1e-9, "{:?}", s);
        }
    }
}
