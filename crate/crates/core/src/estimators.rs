//! Maximum-likelihood estimates of θ from a sample or from lower records,
//! and the plug-in estimates of the density and CDF.
//!
//! Both likelihoods are maximised where `B(θ) = size / T`, with
//! `T = Σ A(x_i)` for a sample and `T = A(r'_m)` for records, so every
//! estimate is `B⁻¹(size / T)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{check_theta, check_x, Family};
use crate::records::RecordSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateKind {
    Sample,
    Records,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    /// `Σ A(x_i)` for samples, `A(r'_m)` for records.
    pub statistic_t: f64,
    pub size: usize,
    pub kind: EstimateKind,
    pub member_name: String,
}

impl EstimateResult {
    /// `size / T`, which equals `B(theta_hat)`.
    pub fn b_hat(&self) -> f64 {
        self.size as f64 / self.statistic_t
    }
}

fn from_statistic(
    member: &dyn Family,
    statistic_t: f64,
    size: usize,
    kind: EstimateKind,
) -> Result<EstimateResult> {
    let ratio = size as f64 / statistic_t;
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Inversion(format!(
            "size / T = {size} / {statistic_t} is not a finite positive number"
        )));
    }
    let theta_hat = member.b_inv(ratio)?;
    if !theta_hat.is_finite() {
        return Err(Error::Inversion(format!("B⁻¹({ratio}) is not finite")));
    }
    Ok(EstimateResult {
        theta_hat,
        statistic_t,
        size,
        kind,
        member_name: member.label(),
    })
}

/// `θ̂ = B⁻¹(n / Σ A(x_i))`.
pub fn mle_theta_sample(member: &dyn Family, xs: &[f64]) -> Result<EstimateResult> {
    if xs.is_empty() {
        return Err(Error::Argument("sample must not be empty".into()));
    }
    let mut t = 0.0;
    for &x in xs {
        check_x(member, x)?;
        t += member.a(x);
    }
    from_statistic(member, t, xs.len(), EstimateKind::Sample)
}

/// `θ̂ = B⁻¹(m / A(r'_m))`; depends on the records only through `m` and the
/// last record.
pub fn mle_theta_records(member: &dyn Family, rec: &RecordSequence) -> Result<EstimateResult> {
    let last = rec.last();
    check_x(member, last)?;
    from_statistic(member, member.a(last), rec.m(), EstimateKind::Records)
}

/// Sample log-likelihood `n ln B(θ) + Σ ln(-A'(x_i)) - B(θ) Σ A(x_i)`.
pub fn sample_log_likelihood(member: &dyn Family, theta: f64, xs: &[f64]) -> Result<f64> {
    check_theta(member, theta)?;
    let b = member.b(theta);
    let mut ll = xs.len() as f64 * b.ln();
    for &x in xs {
        check_x(member, x)?;
        ll += (-member.a_prime(x)).ln() - b * member.a(x);
    }
    Ok(ll)
}

/// `exp(-size A(x) / T)`, i.e. the CDF at `θ̂`.
pub fn plugin_cdf(member: &dyn Family, est: &EstimateResult, x: f64) -> Result<f64> {
    check_x(member, x)?;
    Ok((-est.b_hat() * member.a(x)).exp())
}

/// `(-size A'(x) / T) exp(-size A(x) / T)`, i.e. the density at `θ̂`.
pub fn plugin_pdf(member: &dyn Family, est: &EstimateResult, x: f64) -> Result<f64> {
    check_x(member, x)?;
    let b_hat = est.b_hat();
    Ok(-b_hat * member.a_prime(x) * (-b_hat * member.a(x)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Identity,
    Exp,
    Custom,
}

/// A real function `γ` applied to θ̂ before computing moments.
#[derive(Clone)]
pub struct EstimandTransform {
    kind: TransformKind,
    name: String,
    apply: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for EstimandTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EstimandTransform")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .finish()
    }
}

impl EstimandTransform {
    pub fn identity() -> Self {
        Self {
            kind: TransformKind::Identity,
            name: "identity".into(),
            apply: Arc::new(|t| t),
        }
    }

    /// `γ(t) = e^t`. For the θ̂ of these models `E[e^{2θ̂}]` is typically
    /// infinite (e.g. `e^{2n/T}` with `T` gamma), so its MSE does not exist.
    pub fn exp() -> Self {
        Self {
            kind: TransformKind::Exp,
            name: "exp".into(),
            apply: Arc::new(f64::exp),
        }
    }

    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: TransformKind::Custom,
            name: name.into(),
            apply: Arc::new(f),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Self::identity()),
            "exp" => Ok(Self::exp()),
            other => Err(Error::Argument(format!("unknown transform `{other}`"))),
        }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.apply)(t)
    }
}
