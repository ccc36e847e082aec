//! Gamma-function helpers.
//!
//! General log-gamma and the regularized incomplete gamma come from
//! `statrs`. Ratios of gamma functions at integer arguments, which is all
//! the series code needs, are computed as sums of logarithms of integers so
//! that their accuracy does not degrade with the size of `ln Γ(m)`.

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln Γ(m - k) - ln Γ(m)` for integers `0 <= k < m`, i.e.
/// `-Σ_{j=1}^{k} ln(m - j)`.
pub fn ln_gamma_ratio(m: usize, k: usize) -> f64 {
    assert!(k < m, "Γ(m - k) has a pole for k >= m");
    -(1..=k).map(|j| ((m - j) as f64).ln()).sum::<f64>()
}

/// `ln(k!)` for integer `k`.
pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

/// CDF of the Gamma distribution with the given shape and rate.
pub fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        statrs::function::gamma::gamma_lr(shape, rate * x)
    }
}

/// Log-density of the Gamma distribution with the given shape and rate.
pub fn gamma_ln_pdf(shape: f64, rate: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - ln_gamma(shape)
}
