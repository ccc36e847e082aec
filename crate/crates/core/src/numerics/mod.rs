//! Numerical building blocks shared by the estimation and verification code.

pub mod quadrature;
pub mod roots;
pub mod special;
pub mod summation;

use serde::{Deserialize, Serialize};

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub const fn positive() -> Self {
        Self::new(0.0, f64::INFINITY)
    }

    /// Strict containment; NaN and infinities are never contained.
    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo && x < self.hi
    }

    /// Maps `u` in `(0, 1)` monotonically onto the interval.
    ///
    /// Finite ends use an affine map, half-lines use `u / (1 - u)` and the
    /// real line uses the logit.
    pub fn from_unit(&self, u: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => self.lo + u * (self.hi - self.lo),
            (true, false) => self.lo + u / (1.0 - u),
            (false, true) => self.hi - (1.0 - u) / u,
            (false, false) => (u / (1.0 - u)).ln(),
        }
    }

    /// `n` interior points, evenly spaced in the unit parametrisation over
    /// `[margin, 1 - margin]`.
    pub fn grid(&self, n: usize, margin: f64) -> Vec<f64> {
        if n == 1 {
            return vec![self.from_unit(0.5)];
        }
        (0..n)
            .map(|i| {
                let u = margin + (1.0 - 2.0 * margin) * i as f64 / (n - 1) as f64;
                self.from_unit(u)
            })
            .collect()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_is_open() {
        let unit = Interval::new(0.0, 1.0);
        assert!(!unit.contains(0.0));
        assert!(!unit.contains(1.0));
        assert!(unit.contains(0.5));
        assert!(!Interval::real_line().contains(f64::INFINITY));
        assert!(!Interval::real_line().contains(f64::NAN));
    }

    #[test]
    fn unit_map_is_increasing_and_interior() {
        for iv in [
            Interval::new(0.0, 1.0),
            Interval::positive(),
            Interval::real_line(),
            Interval::new(f64::NEG_INFINITY, 3.0),
        ] {
            let g = iv.grid(50, 1e-3);
            assert!(g.windows(2).all(|w| w[0] < w[1]), "{iv}");
            assert!(g.iter().all(|&x| iv.contains(x)), "{iv}");
        }
    }
}
