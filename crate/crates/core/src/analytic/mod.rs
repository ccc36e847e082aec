//! Closed forms and truncated series for the bias and MSE of the estimators.
//!
//! The estimators are all functions of a single statistic `T` with
//! `T ~ Gamma(m, rate = B(θ))` (for a sample of size `m` or for `m`
//! records), so each expectation is a gamma integral. Expanding
//! `exp(-c / T)` in powers of `1/T` gives series whose coefficients are the
//! negative moments `E[T^-i] = rate^i Γ(m - i) / Γ(m)`; these exist only for
//! `i < m`, so every series is truncated before the first Gamma pole.
//!
//! [`gamma_expectation_quadrature`] evaluates the same expectations
//! directly and is the reference the series are checked against.

mod quadrature;
mod series;

pub use quadrature::gamma_expectation_quadrature;
pub use series::SeriesEvaluation;

use series::GammaSeries;

use crate::error::{Error, Result};
use crate::family::{check_theta, check_x, pdf, Family};
use crate::numerics::special::ln_gamma_ratio;

/// `E[T^-k] = rate^k Γ(m - k) / Γ(m)` for `T ~ Gamma(m, rate)`, `1 <= k < m`.
pub fn negative_gamma_moment(m: usize, k: usize, rate: f64) -> Result<f64> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Argument(format!("gamma rate must be positive, got {rate}")));
    }
    if k == 0 {
        return Err(Error::Argument("moment order must be at least 1".into()));
    }
    if k >= m {
        return Err(Error::MomentNonexistence { m, k });
    }
    Ok((k as f64 * rate.ln() + ln_gamma_ratio(m, k)).exp())
}

fn interior(member: &dyn Family, theta: f64, x: f64) -> Result<(f64, f64, f64)> {
    check_theta(member, theta)?;
    check_x(member, x)?;
    Ok((member.a(x), -member.a_prime(x), member.b(theta)))
}

/// `E[F̂] = Σ_{i=0}^{m-1} Γ(m-i) / (Γ(m) i!) · (-m B(θ) A(x))^i`.
pub fn expectation_cdf_plugin_series(
    member: &dyn Family,
    theta: f64,
    x: f64,
    m: usize,
) -> Result<SeriesEvaluation> {
    let (a, _, b) = interior(member, theta, x)?;
    if m == 0 {
        return Err(Error::Argument("number of records must be at least 1".into()));
    }
    let series = GammaSeries {
        m,
        offset: 0,
        base: m as f64 * b * a,
        alternating: true,
        ln_prefactor: 0.0,
    };
    Ok(series.evaluate(|_| 1.0, 0.0))
}

/// `E[f̂] = Σ_{i=0}^{m-2} Γ(m-i-1) / (Γ(m) i!) · (-1)^i (m B)^{i+1} (-A'(x)) A(x)^i`.
pub fn expectation_pdf_plugin_series(
    member: &dyn Family,
    theta: f64,
    x: f64,
    m: usize,
) -> Result<SeriesEvaluation> {
    let (a, neg_a_prime, b) = interior(member, theta, x)?;
    if m < 2 {
        return Err(Error::SeriesUndefined(format!(
            "E[f̂] needs E[1/T], which does not exist for m = {m}"
        )));
    }
    let mb = m as f64 * b;
    let series = GammaSeries {
        m,
        offset: 1,
        base: mb * a,
        alternating: true,
        ln_prefactor: mb.ln() + neg_a_prime.ln(),
    };
    Ok(series.evaluate(|_| 1.0, 0.0))
}

/// `E[f̂²] = (m B A'(x))² Σ_{i=0}^{m-3} Γ(m-i-2) / (Γ(m) i!) · (-2 m B A(x))^i`.
pub fn second_moment_pdf_plugin_series(
    member: &dyn Family,
    theta: f64,
    x: f64,
    m: usize,
) -> Result<SeriesEvaluation> {
    let (a, neg_a_prime, b) = interior(member, theta, x)?;
    if m < 3 {
        return Err(Error::MomentNonexistence { m, k: 2 });
    }
    let mb = m as f64 * b;
    let series = GammaSeries {
        m,
        offset: 2,
        base: 2.0 * mb * a,
        alternating: true,
        ln_prefactor: 2.0 * (mb.ln() + neg_a_prime.ln()),
    };
    Ok(series.evaluate(|_| 1.0, 0.0))
}

/// `E[F̂²]`: the `E[F̂]` series with `m A(x)` doubled.
pub fn second_moment_cdf_plugin_series(
    member: &dyn Family,
    theta: f64,
    x: f64,
    m: usize,
) -> Result<SeriesEvaluation> {
    let (a, _, b) = interior(member, theta, x)?;
    if m == 0 {
        return Err(Error::Argument("number of records must be at least 1".into()));
    }
    let series = GammaSeries {
        m,
        offset: 0,
        base: 2.0 * m as f64 * b * a,
        alternating: true,
        ln_prefactor: 0.0,
    };
    Ok(series.evaluate(|_| 1.0, 0.0))
}

/// `MSE[F̂] = Σ_{i=0}^{m-1} Γ(m-i) / (Γ(m) i!) (-m A B)^i [2^i - 2F] + F²`
/// with `F = exp(-A(x) B(θ))`.
pub fn mse_cdf_plugin_series(
    member: &dyn Family,
    theta: f64,
    x: f64,
    m: usize,
) -> Result<SeriesEvaluation> {
    let (a, _, b) = interior(member, theta, x)?;
    if m == 0 {
        return Err(Error::Argument("number of records must be at least 1".into()));
    }
    let big_f = (-a * b).exp();
    let series = GammaSeries {
        m,
        offset: 0,
        base: m as f64 * b * a,
        alternating: true,
        ln_prefactor: 0.0,
    };
    let mut eval = series.evaluate(|i| 2f64.powi(i as i32) - 2.0 * big_f, big_f * big_f);
    if eval.value < 0.0 {
        eval.warnings.push(format!(
            "negative MSE {:e}: the truncated series has broken down",
            eval.value
        ));
    }
    Ok(eval)
}

/// `MSE[f̂] = E[f̂²] - 2 f E[f̂] + f²` from the two moment series.
pub fn mse_pdf_plugin(member: &dyn Family, theta: f64, x: f64, m: usize) -> Result<SeriesEvaluation> {
    if m < 3 {
        check_theta(member, theta)?;
        check_x(member, x)?;
        return Err(Error::MomentNonexistence { m, k: 2 });
    }
    let second = second_moment_pdf_plugin_series(member, theta, x, m)?;
    let first = expectation_pdf_plugin_series(member, theta, x, m)?;
    let f = pdf(member, theta, x)?;
    let value = second.value - 2.0 * f * first.value + f * f;
    let mut warnings = vec![
        "assembled as E[f̂²] - 2 f E[f̂] + f² from the moment series".to_owned(),
    ];
    warnings.extend(second.warnings);
    warnings.extend(first.warnings);
    if value < 0.0 {
        warnings.push(format!("negative MSE {value:e}: the truncated series has broken down"));
    }
    Ok(SeriesEvaluation {
        value,
        truncation_index: second.truncation_index,
        first_pole: second.first_pole,
        last_term_magnitude: second.last_term_magnitude,
        formal_only: false,
        warnings,
    })
}

/// Which closed form to use for the MSE of θ̂ in the power-function model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMseForm {
    /// `θ² (n + 2) / ((n - 1)(n - 2))`, from the negative gamma moments.
    Exact,
    /// `θ² [n² / ((n-2)(n-1)) - 2n / (n-2) + 1]`, the commonly quoted form
    /// with the wrong cross-term coefficient; negative at `n = 3`.
    Verbatim,
}

/// MSE of `θ̂ = n / T` for `A(x) = -ln x`, `B(θ) = θ`.
pub fn mse_theta_power(n: usize, theta: f64, form: ThetaMseForm) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Argument(format!("theta must be positive, got {theta}")));
    }
    if n < 3 {
        return Err(Error::MomentNonexistence { m: n, k: 2 });
    }
    let nf = n as f64;
    match form {
        ThetaMseForm::Exact => {
            let second = nf * nf * negative_gamma_moment(n, 2, theta)?;
            let first = nf * negative_gamma_moment(n, 1, theta)?;
            Ok(second - 2.0 * theta * first + theta * theta)
        }
        ThetaMseForm::Verbatim => {
            let coef = nf * nf / ((nf - 2.0) * (nf - 1.0)) - 2.0 * nf / (nf - 2.0) + 1.0;
            Ok(coef * theta * theta)
        }
    }
}

pub fn mse_theta_power_exact(n: usize, theta: f64) -> Result<f64> {
    mse_theta_power(n, theta, ThetaMseForm::Exact)
}

/// Formal series for the MSE of `exp(θ̂)` in the power-function model:
/// `Σ_{i=0}^{n-1} (nθ)^i Γ(n-i) / (Γ(n) i!) (2^i - 2e^θ) + e^{2θ}`.
///
/// `E[exp(2n/T)]` is infinite, so this is not the MSE of anything; the
/// result is flagged `formal_only` and may be negative.
pub fn mse_exp_theta_series(n: usize, theta: f64) -> Result<SeriesEvaluation> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::Argument(format!("theta must be positive, got {theta}")));
    }
    if n == 0 {
        return Err(Error::Argument("sample size must be at least 1".into()));
    }
    let e_theta = theta.exp();
    let series = GammaSeries {
        m: n,
        offset: 0,
        base: n as f64 * theta,
        alternating: false,
        ln_prefactor: 0.0,
    };
    let mut eval = series.evaluate(|i| 2f64.powi(i as i32) - 2.0 * e_theta, e_theta * e_theta);
    eval.formal_only = true;
    eval.warnings.push(
        "formal series: E[exp(2θ̂)] is infinite, so the true MSE of exp(θ̂) does not exist".into(),
    );
    if eval.value < 0.0 {
        eval.warnings.push(format!("formal value is negative ({:e})", eval.value));
    }
    Ok(eval)
}

/// `Γ(n-i-1) n^{i+1} / Γ(n) = Π_{j=1}^{i+1} n / (n - j)`, which tends to 1
/// as `n → ∞` for fixed `i`.
pub fn gamma_ratio(n: usize, i: usize) -> Result<f64> {
    if i + 2 > n {
        return Err(Error::Argument(format!(
            "ratio needs i + 2 <= n, got n = {n}, i = {i}"
        )));
    }
    let nf = n as f64;
    let ln: f64 = (1..=i + 1).map(|j| -(-(j as f64) / nf).ln_1p()).sum();
    Ok(ln.exp())
}
