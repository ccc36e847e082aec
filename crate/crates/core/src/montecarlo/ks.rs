//! Kolmogorov-Smirnov tests with asymptotic p-values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::special::gamma_cdf;

pub const KS_MIN_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form converges fast for small λ.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let sum: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (odd * odd * y).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let sum: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * lambda * lambda).exp()
            })
            .sum();
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Small-sample correction of the asymptotic statistic.
fn p_value(d: f64, effective_n: f64) -> f64 {
    let sqrt_n = effective_n.sqrt();
    kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::Argument("KS input contains NaN".into()));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample statistic `sup |F_a - F_b|` with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < KS_MIN_SIZE || b.len() < KS_MIN_SIZE {
        return Err(Error::Argument(format!(
            "two-sample KS needs at least {KS_MIN_SIZE} points per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: p_value(d, na * nb / (na + nb)),
    })
}

/// One-sample statistic against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> Result<KsResult> {
    if data.len() < KS_MIN_SIZE {
        return Err(Error::Argument(format!(
            "KS needs at least {KS_MIN_SIZE} points, got {}",
            data.len()
        )));
    }
    let xs = sorted(data)?;
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic: d,
        p_value: p_value(d, n),
    })
}

/// One-sample test against `Gamma(shape, rate)`.
pub fn ks_gamma_gof(data: &[f64], shape: usize, rate: f64) -> Result<KsResult> {
    if shape == 0 || !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Argument(format!(
            "gamma shape must be >= 1 and rate positive, got {shape}, {rate}"
        )));
    }
    if let Some(x) = data.iter().find(|&&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Argument(format!("gamma data must be positive, found {x}")));
    }
    ks_one_sample(data, |x| gamma_cdf(shape as f64, rate, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::seeded_rng;
    use rand::Rng;

    #[test]
    fn kolmogorov_branches_agree_at_switch() {
        let y = -std::f64::consts::PI.powi(2) / (8.0 * 1.18 * 1.18);
        let theta: f64 = (1..=20)
            .map(|k| (((2 * k - 1) as f64).powi(2) * y).exp())
            .sum();
        let small = 1.0 - (2.0 * std::f64::consts::PI).sqrt() / 1.18 * theta;
        let large = kolmogorov_sf(1.18);
        assert!((small - large).abs() < 1e-12, "{small} vs {large}");
        // Known quantile: P(K > 1.358) ≈ 0.05.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn identical_samples() {
        let a: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn disjoint_supports() {
        let a: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 2.0).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-3);
    }

    #[test]
    fn undersized_inputs() {
        let small = [1.0, 2.0];
        let big: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(ks_two_sample(&small, &big).is_err());
        assert!(ks_gamma_gof(&small, 2, 1.0).is_err());
        assert!(ks_gamma_gof(&[], 2, 1.0).is_err());
        let mut bad = big.clone();
        bad[0] = -1.0;
        assert!(ks_gamma_gof(&bad, 2, 1.0).is_err());
    }

    #[test]
    fn uniform_samples_calibrate() {
        // p > 0.01 should fail at most about 1% of the time under the null.
        let mut rng = seeded_rng(99);
        let trials = 200;
        let passes = (0..trials)
            .filter(|_| {
                let a: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
                let b: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
                ks_two_sample(&a, &b).unwrap().p_value > 0.01
            })
            .count();
        assert!(passes as f64 >= 0.99 * trials as f64, "{passes}/{trials}");
    }

    fn gamma_draws(shape: usize, rate: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded_rng(seed);
        (0..n)
            .map(|_| {
                (0..shape)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .sum::<f64>()
                    / rate
            })
            .collect()
    }

    #[test]
    fn gamma_fit_and_power() {
        let data = gamma_draws(5, 2.0, 10_000, 4);
        assert!(ks_gamma_gof(&data, 5, 2.0).unwrap().p_value > 0.01);
        assert!(ks_gamma_gof(&data, 50, 2.0).unwrap().p_value < 1e-6);
    }
}
