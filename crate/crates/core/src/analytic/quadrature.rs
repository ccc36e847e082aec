//! `E[g(T)]` for `T ~ Gamma(m, rate)` by adaptive quadrature.

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_lower_tail, integrate_upper_tail, QuadOptions};
use crate::numerics::special::gamma_ln_pdf;

/// Below this log-weight the gamma mass is treated as exhausted when
/// probing the tails.
const LN_NEGLIGIBLE: f64 = -700.0;
/// A tail probe that has not decayed to this fraction of the peak marks the
/// integral as divergent.
const TAIL_DECAY: f64 = 1e-8;

fn probe_tail<G, I>(g: &G, ln_w: &dyn Fn(f64) -> f64, points: I, peak: f64, side: &str) -> Result<()>
where
    G: Fn(f64) -> f64,
    I: Iterator<Item = f64>,
{
    let mut peak = peak;
    let mut last = None;
    for t in points {
        // Integrand against dt/t (log scale), so polynomial tails compare fairly.
        let lw = ln_w(t) + t.ln();
        if lw < LN_NEGLIGIBLE {
            break;
        }
        let v = (g(t) * lw.exp()).abs();
        if !v.is_finite() {
            return Err(Error::Divergence(format!(
                "integrand is not finite at t = {t:e} in the {side} tail"
            )));
        }
        peak = peak.max(v);
        last = Some((t, v));
    }
    match last {
        Some((t, v)) if v > TAIL_DECAY * peak => Err(Error::Divergence(format!(
            "integrand has not decayed in the {side} tail (t = {t:e}, value {v:e}, peak {peak:e})"
        ))),
        _ => Ok(()),
    }
}

/// `∫₀^∞ g(t) rate^m t^{m-1} e^{-rate t} / Γ(m) dt`.
///
/// The range is split at the gamma mode (the mean when `m = 1`). The left
/// piece is integrated in `u = ln t`, the right piece on a half-line map;
/// both to relative tolerance 1e-10. Before integrating, both tails are
/// probed on a geometric grid and a non-finite or non-decaying integrand is
/// reported as [`Error::Divergence`] (e.g. `g(t) = e^{c/t}`, `c > 0`).
pub fn gamma_expectation_quadrature<G>(g: G, m: usize, rate: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    if m == 0 {
        return Err(Error::Argument("gamma shape must be at least 1".into()));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Argument(format!("gamma rate must be positive, got {rate}")));
    }
    let shape = m as f64;
    let split = if m > 1 { (shape - 1.0) / rate } else { 1.0 / rate };
    let ln_w = |t: f64| gamma_ln_pdf(shape, rate, t);

    let at_split = (g(split) * (ln_w(split) + split.ln()).exp()).abs();
    if !at_split.is_finite() {
        return Err(Error::Divergence(format!("integrand is not finite at t = {split}")));
    }
    let spread = shape.sqrt() / rate;
    probe_tail(&g, &ln_w, (1..=300).map(|k| split * 10f64.powi(-k)), at_split, "lower")?;
    probe_tail(
        &g,
        &ln_w,
        (-2..=300).map(|k| split + spread * 10f64.powi(k)),
        at_split,
        "upper",
    )?;

    // Purely relative: expectations such as E[T^-k] can be far below any
    // fixed absolute floor.
    let opts = QuadOptions {
        abs_tol: 0.0,
        ..QuadOptions::default()
    };
    let left = integrate_lower_tail(
        |u: f64| {
            let t = u.exp();
            let lw = ln_w(t) + u;
            if t == 0.0 || lw < LN_NEGLIGIBLE - 50.0 {
                0.0
            } else {
                g(t) * lw.exp()
            }
        },
        split.ln(),
        1.0 / shape.sqrt(),
        opts,
    )?;
    let right = integrate_upper_tail(
        |t: f64| {
            let lw = ln_w(t);
            if lw < LN_NEGLIGIBLE - 50.0 {
                0.0
            } else {
                g(t) * lw.exp()
            }
        },
        split,
        spread,
        opts,
    )?;
    Ok(left.value + right.value)
}
