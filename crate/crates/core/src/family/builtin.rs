use super::Family;
use crate::error::{Error, Result};
use crate::numerics::Interval;

fn into_support(member: &dyn Family, y: f64, x: f64) -> Result<f64> {
    if member.support().contains(x) {
        Ok(x)
    } else {
        Err(Error::Inversion(format!(
            "A⁻¹({y}) = {x} is outside the support of {}",
            member.label()
        )))
    }
}

fn into_domain(member: &dyn Family, y: f64, theta: f64) -> Result<f64> {
    if member.theta_domain().contains(theta) {
        Ok(theta)
    } else {
        Err(Error::Inversion(format!(
            "B⁻¹({y}) = {theta} is outside the parameter domain of {}",
            member.label()
        )))
    }
}

/// `F(x) = x^θ` on `(0, 1)`: `A(x) = -ln x`, `B(θ) = θ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerFunction;

impl Family for PowerFunction {
    fn name(&self) -> &str {
        "power"
    }

    fn support(&self) -> Interval {
        Interval::new(0.0, 1.0)
    }

    fn theta_domain(&self) -> Interval {
        Interval::positive()
    }

    fn a(&self, x: f64) -> f64 {
        -x.ln()
    }

    fn a_prime(&self, x: f64) -> f64 {
        -1.0 / x
    }

    fn a_inv(&self, y: f64) -> Result<f64> {
        into_support(self, y, (-y).exp())
    }

    fn b(&self, theta: f64) -> f64 {
        theta
    }

    fn b_inv(&self, y: f64) -> Result<f64> {
        into_domain(self, y, y)
    }
}

/// Gumbel (minimum-stable form) on the real line: `A(x) = e^{-x}`,
/// `B(θ) = e^θ`, so `F(x) = exp(-e^{θ - x})`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gumbel;

impl Family for Gumbel {
    fn name(&self) -> &str {
        "gumbel"
    }

    fn support(&self) -> Interval {
        Interval::real_line()
    }

    fn theta_domain(&self) -> Interval {
        Interval::real_line()
    }

    fn a(&self, x: f64) -> f64 {
        (-x).exp()
    }

    fn a_prime(&self, x: f64) -> f64 {
        -(-x).exp()
    }

    fn a_inv(&self, y: f64) -> Result<f64> {
        into_support(self, y, -y.ln())
    }

    fn b(&self, theta: f64) -> f64 {
        theta.exp()
    }

    fn b_inv(&self, y: f64) -> Result<f64> {
        into_domain(self, y, y.ln())
    }
}

/// Fréchet with fixed shape `α` on `(0, ∞)`: `A(x) = x^{-α}`,
/// `B(θ) = θ^α`, so `F(x) = exp(-(θ / x)^α)`.
#[derive(Debug, Clone, Copy)]
pub struct Frechet {
    alpha: f64,
}

impl Frechet {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self { alpha })
        } else {
            Err(Error::Argument(format!(
                "Fréchet shape must be positive and finite, got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Family for Frechet {
    fn name(&self) -> &str {
        "frechet"
    }

    fn label(&self) -> String {
        format!("frechet(alpha={})", self.alpha)
    }

    fn support(&self) -> Interval {
        Interval::positive()
    }

    fn theta_domain(&self) -> Interval {
        Interval::positive()
    }

    fn a(&self, x: f64) -> f64 {
        x.powf(-self.alpha)
    }

    fn a_prime(&self, x: f64) -> f64 {
        -self.alpha * x.powf(-self.alpha - 1.0)
    }

    fn a_inv(&self, y: f64) -> Result<f64> {
        into_support(self, y, y.powf(-1.0 / self.alpha))
    }

    fn b(&self, theta: f64) -> f64 {
        theta.powf(self.alpha)
    }

    fn b_inv(&self, y: f64) -> Result<f64> {
        into_domain(self, y, y.powf(1.0 / self.alpha))
    }
}
