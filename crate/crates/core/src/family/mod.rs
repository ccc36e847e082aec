//! The family of distributions with CDF `F(x; θ) = exp(-B(θ) A(x))`.
//!
//! A member is fixed by a decreasing function `A` on an open support
//! `(a, b)`, with `A → +∞` at `a` and `A → 0` at `b`, and a positive,
//! one-to-one function `B` of the scalar parameter. Every quantity in this
//! crate (likelihoods, estimators, record laws) is expressed through these
//! two functions, so members plug in behind the [`Family`] trait and are
//! looked up by name in a [`FamilyRegistry`].
//!
//! A useful fact used throughout: if `X ~ F(·; θ)` then `A(X)` is
//! exponential with rate `B(θ)`.

mod builtin;
mod registry;
mod validate;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use builtin::{Frechet, Gumbel, PowerFunction};
pub use registry::{FamilyRegistry, MemberHandle, MemberParams};
pub use validate::{validate_member, CheckOutcome, ValidationReport};

use crate::error::{Error, Result};
use crate::numerics::roots::invert_monotone;
use crate::numerics::Interval;

/// A member of the family, described by its `A` and `B` functions.
///
/// Implementors must supply `A`, `A'` and `B`; the inverses default to a
/// bracketing root finder on the support or parameter domain and should be
/// overridden when a closed form exists.
pub trait Family: Send + Sync + fmt::Debug {
    /// Registry key, e.g. `"power"`.
    fn name(&self) -> &str;

    /// Name plus hyperparameters; used in reports and digests.
    fn label(&self) -> String {
        self.name().to_owned()
    }

    fn support(&self) -> Interval;

    fn theta_domain(&self) -> Interval;

    fn a(&self, x: f64) -> f64;

    fn a_prime(&self, x: f64) -> f64;

    /// Inverse of `A`; maps `(0, ∞)` back into the support.
    fn a_inv(&self, y: f64) -> Result<f64> {
        invert_monotone(|x| self.a(x), y, self.support())
    }

    fn b(&self, theta: f64) -> f64;

    /// Inverse of `B`; errors when `y` is outside the range of `B`.
    fn b_inv(&self, y: f64) -> Result<f64> {
        invert_monotone(|t| self.b(t), y, self.theta_domain())
    }
}

pub fn check_x(member: &dyn Family, x: f64) -> Result<()> {
    let s = member.support();
    if s.contains(x) {
        Ok(())
    } else {
        Err(Error::Domain {
            member: member.label(),
            x,
            lo: s.lo,
            hi: s.hi,
        })
    }
}

pub fn check_theta(member: &dyn Family, theta: f64) -> Result<()> {
    let d = member.theta_domain();
    if d.contains(theta) {
        Ok(())
    } else {
        Err(Error::Parameter {
            member: member.label(),
            theta,
            lo: d.lo,
            hi: d.hi,
        })
    }
}

/// `F(x; θ) = exp(-B(θ) A(x))`.
pub fn cdf(member: &dyn Family, theta: f64, x: f64) -> Result<f64> {
    check_theta(member, theta)?;
    check_x(member, x)?;
    Ok((-member.b(theta) * member.a(x)).exp())
}

/// `f(x; θ) = -B(θ) A'(x) exp(-B(θ) A(x))`.
pub fn pdf(member: &dyn Family, theta: f64, x: f64) -> Result<f64> {
    Ok(ln_pdf(member, theta, x)?.exp())
}

pub fn ln_pdf(member: &dyn Family, theta: f64, x: f64) -> Result<f64> {
    check_theta(member, theta)?;
    check_x(member, x)?;
    let b = member.b(theta);
    Ok(b.ln() + (-member.a_prime(x)).ln() - b * member.a(x))
}

/// Inverse CDF: `A⁻¹(-ln p / B(θ))`.
pub fn quantile(member: &dyn Family, theta: f64, p: f64) -> Result<f64> {
    check_theta(member, theta)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Argument(format!("probability {p} is not in (0, 1)")));
    }
    member.a_inv(-p.ln() / member.b(theta))
}

/// Standard exponential variate by inversion; strictly positive.
pub(crate) fn std_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return -u.ln();
        }
    }
}

/// The generator used for all seeded entry points.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` i.i.d. draws by inverse transform, `X = A⁻¹(E / B(θ))` with
/// `E ~ Exp(1)`.
pub fn sample_iid(member: &dyn Family, theta: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_iid_with(member, theta, n, &mut seeded_rng(seed))
}

pub fn sample_iid_with<R: Rng + ?Sized>(
    member: &dyn Family,
    theta: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_theta(member, theta)?;
    if n == 0 {
        return Err(Error::Argument("sample size must be at least 1".into()));
    }
    let rate = member.b(theta);
    let support = member.support();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = member.a_inv(std_exponential(rng) / rate)?;
        // Draws that round onto an endpoint are discarded.
        if support.contains(x) {
            out.push(x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
