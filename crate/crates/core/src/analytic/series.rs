//! Truncated expansions of `E[h(T)]`, `T ~ Gamma(m, rate)`, in powers of
//! `1/T`.
//!
//! Every term carries a factor `Γ(m - offset - i)`, so the sums stop at the
//! last `i` before that factor hits a pole. Terms are formed in log space
//! with the sign tracked separately and added with compensated summation.

use serde::Serialize;

use crate::numerics::special::ln_gamma_ratio;
use crate::numerics::summation::CompensatedSum;

/// A truncated series value and diagnostics about where it stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesEvaluation {
    pub value: f64,
    /// Index of the last term included.
    pub truncation_index: usize,
    /// Index of the first term whose Gamma factor has a pole.
    pub first_pole: usize,
    pub last_term_magnitude: f64,
    /// Set when the expectation the series stands for does not exist.
    pub formal_only: bool,
    pub warnings: Vec<String>,
}

/// One term family `Γ(m - offset - i) / (Γ(m) i!) · (±base)^i`, scaled by
/// `exp(ln_prefactor)` and a per-term weight.
pub(crate) struct GammaSeries {
    pub m: usize,
    pub offset: usize,
    pub base: f64,
    pub alternating: bool,
    pub ln_prefactor: f64,
}

/// Ratio of the largest term to the result beyond which cancellation is
/// reported.
const CANCELLATION_WARN: f64 = 1e8;

impl GammaSeries {
    pub fn first_pole(&self) -> usize {
        self.m - self.offset
    }

    /// `(sign, ln|term|)` for `i = 0..first_pole`.
    pub fn terms(&self) -> Vec<(f64, f64)> {
        let pole = self.first_pole();
        let ln_base = self.base.ln();
        let mut ln_coef = ln_gamma_ratio(self.m, self.offset);
        let mut out = Vec::with_capacity(pole);
        for i in 0..pole {
            if i > 0 {
                // Γ(m-o-i)/i! from Γ(m-o-i+1)/(i-1)!
                ln_coef -= ((self.m - self.offset - i) as f64).ln() + (i as f64).ln();
            }
            let ln_mag = if i == 0 {
                self.ln_prefactor + ln_coef
            } else {
                self.ln_prefactor + ln_coef + i as f64 * ln_base
            };
            let sign = if self.alternating && i % 2 == 1 { -1.0 } else { 1.0 };
            out.push((sign, ln_mag));
        }
        out
    }

    /// Sums `term_i * weight(i)` over all finite terms, then adds
    /// `constant`.
    pub fn evaluate<W: Fn(usize) -> f64>(&self, weight: W, constant: f64) -> SeriesEvaluation {
        let terms = self.terms();
        let mut acc = CompensatedSum::new();
        let mut largest: f64 = constant.abs();
        let mut last = 0.0;
        for (i, &(sign, ln_mag)) in terms.iter().enumerate() {
            let t = sign * ln_mag.exp() * weight(i);
            largest = largest.max(t.abs());
            last = t.abs();
            acc.add(t);
        }
        acc.add(constant);
        let value = acc.value();
        let mut warnings = Vec::new();
        if !value.is_finite() {
            warnings.push("series overflowed; value is not finite".into());
        } else if value != 0.0 && largest / value.abs() > CANCELLATION_WARN {
            warnings.push(format!(
                "largest term {largest:e} exceeds the result by more than {CANCELLATION_WARN:e}; \
                 cancellation limits accuracy"
            ));
        }
        SeriesEvaluation {
            value,
            truncation_index: terms.len() - 1,
            first_pole: self.first_pole(),
            last_term_magnitude: last,
            formal_only: false,
            warnings,
        }
    }
}
