//! Numerical checks of the structural requirements on `A` and `B`.

use serde::Serialize;

use super::Family;
use crate::error::{Error, Result};

const GRID_MARGIN: f64 = 0.02;
const INVERSE_REL_TOL: f64 = 1e-10;
const DERIVATIVE_REL_TOL: f64 = 1e-6;
/// `A` must exceed this near the lower end of the support.
const LOWER_END_A: f64 = 100.0;
/// `A` must fall below this near the upper end of the support.
const UPPER_END_A: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub member: String,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Converts a failing report into [`Error::Validation`].
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            let failed = self.failed().map(|c| c.name).collect::<Vec<_>>().join(", ");
            Err(Error::Validation {
                member: self.member,
                failed,
            })
        }
    }
}

fn outcome(name: &'static str, failure: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failure.is_none(),
        detail: failure.unwrap_or_else(|| "ok".into()),
    }
}

fn round_trip_close(x: f64, back: f64) -> bool {
    (back - x).abs() <= INVERSE_REL_TOL * x.abs() + 1e-14
}

/// Points approaching `end` from inside the support: `end ∓ s·10^-k` for a
/// finite end, `±10^k` for an infinite one.
fn approach(end: f64, from_above: bool) -> Vec<f64> {
    let dir = if from_above { 1.0 } else { -1.0 };
    if end.is_finite() {
        let scale = end.abs().max(1.0);
        (1..=300)
            .map(|k| end + dir * scale * 10f64.powi(-k))
            .take_while(|&x| x != end)
            .collect()
    } else {
        (1..=300).map(|k| -dir * 10f64.powi(k)).collect()
    }
}

/// Checks monotonicity, sign of `A'`, finite-difference agreement of `A'`,
/// both inverse round trips, positivity of `B` and the boundary behaviour
/// of `A` on interior grids of `grid_size` points.
pub fn validate_member(member: &dyn Family, grid_size: usize) -> Result<ValidationReport> {
    if grid_size < 3 {
        return Err(Error::Argument(format!(
            "validation grid needs at least 3 points, got {grid_size}"
        )));
    }
    let support = member.support();
    let xs = support.grid(grid_size, GRID_MARGIN);
    let thetas = member.theta_domain().grid(grid_size, GRID_MARGIN);
    let a_vals: Vec<f64> = xs.iter().map(|&x| member.a(x)).collect();
    let mut checks = Vec::new();

    checks.push(outcome(
        "a_decreasing",
        xs.windows(2).zip(a_vals.windows(2)).find_map(|(x, a)| {
            (a[0].is_nan() || a[0] <= a[1])
                .then(|| format!("A({}) = {} <= A({}) = {}", x[0], a[0], x[1], a[1]))
        }),
    ));

    checks.push(outcome(
        "a_prime_negative",
        xs.iter().find_map(|&x| {
            let d = member.a_prime(x);
            (d.is_nan() || d >= 0.0).then(|| format!("A'({x}) = {d}"))
        }),
    ));

    checks.push(outcome(
        "a_prime_matches_difference",
        xs.iter().find_map(|&x| {
            let h = 1e-5 * x.abs().max(1e-3);
            let (lo, hi) = (x - h, x + h);
            if !(support.contains(lo) && support.contains(hi)) {
                return None;
            }
            let fd = (member.a(hi) - member.a(lo)) / (2.0 * h);
            let d = member.a_prime(x);
            ((fd - d).abs() > DERIVATIVE_REL_TOL * d.abs())
                .then(|| format!("A'({x}) = {d} but central difference gives {fd}"))
        }),
    ));

    checks.push(outcome(
        "a_inverse_round_trip",
        xs.iter().zip(&a_vals).find_map(|(&x, &a)| match member.a_inv(a) {
            Ok(back) if round_trip_close(x, back) => None,
            Ok(back) => Some(format!("A⁻¹(A({x})) = {back}")),
            Err(e) => Some(format!("A⁻¹(A({x})) failed: {e}")),
        }),
    ));

    let near_lo = approach(support.lo, true);
    checks.push(outcome(
        "a_unbounded_at_lower_end",
        match near_lo.last().map(|&x| (x, member.a(x))) {
            Some((_, a)) if a >= LOWER_END_A => None,
            Some((x, a)) => Some(format!("A({x}) = {a} < {LOWER_END_A}")),
            None => Some("no representable points near the lower end".into()),
        },
    ));

    let near_hi = approach(support.hi, false);
    checks.push(outcome(
        "a_vanishes_at_upper_end",
        match near_hi.last().map(|&x| (x, member.a(x))) {
            Some((_, a)) if (0.0..=UPPER_END_A).contains(&a) => None,
            Some((x, a)) => Some(format!("A({x}) = {a} > {UPPER_END_A}")),
            None => Some("no representable points near the upper end".into()),
        },
    ));

    let b_vals: Vec<f64> = thetas.iter().map(|&t| member.b(t)).collect();
    checks.push(outcome(
        "b_positive",
        thetas
            .iter()
            .zip(&b_vals)
            .find_map(|(&t, &b)| (b.is_nan() || b <= 0.0).then(|| format!("B({t}) = {b}"))),
    ));

    let increasing = b_vals.windows(2).all(|w| w[0] < w[1]);
    let decreasing = b_vals.windows(2).all(|w| w[0] > w[1]);
    checks.push(outcome(
        "b_strictly_monotone",
        (!increasing && !decreasing).then(|| "B is not strictly monotone on the grid".into()),
    ));

    checks.push(outcome(
        "b_inverse_round_trip",
        thetas.iter().zip(&b_vals).find_map(|(&t, &b)| match member.b_inv(b) {
            Ok(back) if round_trip_close(t, back) => None,
            Ok(back) => Some(format!("B⁻¹(B({t})) = {back}")),
            Err(e) => Some(format!("B⁻¹(B({t})) failed: {e}")),
        }),
    ));

    Ok(ValidationReport {
        member: member.label(),
        checks,
    })
}
