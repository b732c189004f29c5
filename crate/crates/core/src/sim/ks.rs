//! Kolmogorov–Smirnov statistics.

/// Asymptotic 1% critical value coefficient.
const KS_1PCT: f64 = 1.63;

/// `sup_x |F_n(x) - F(x)|` for a sorted sample.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// `sup_x |F_n(x) - G_m(x)|` for two sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// `1.63 / √n`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    KS_1PCT / (n as f64).sqrt()
}

/// `1.63 √((n+m)/(nm))`.
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_1PCT * ((n + m) / (n * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::rng::{exponential, replicate_rng};

    #[test]
    fn one_sample_by_hand() {
        let d = ks_statistic(&[0.5], |x| x);
        assert!((d - 0.5).abs() < 1e-15);
        let d = ks_statistic(&[0.25, 0.75], |x| x);
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_sample_by_hand() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exponential_draws_pass() {
        let mut rng = replicate_rng(5, 0, 0);
        let mut xs: Vec<f64> = (0..20_000).map(|_| exponential(&mut rng, 1.0)).collect();
        xs.sort_by(f64::total_cmp);
        assert!(ks_statistic(&xs, |x| -(-x).exp_m1()) < ks_critical_1pct(xs.len()));
        assert!((ks_critical_1pct(2000) - 0.0365).abs() < 1e-4);
    }
}
