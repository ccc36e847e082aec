//! Inversion of strictly monotone functions on an open interval.

use super::Interval;
use crate::error::{Error, Result};

pub const ROOT_REL_TOL: f64 = 1e-12;
pub const ROOT_MAX_ITER: usize = 200;

/// Order-preserving map from `f64` to `i64`.
fn key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        i64::MIN - bits
    } else {
        bits
    }
}

fn from_key(k: i64) -> f64 {
    let bits = if k < 0 { i64::MIN - k } else { k };
    f64::from_bits(bits as u64)
}

fn key_mid(lo: i64, hi: i64) -> i64 {
    ((lo as i128 + hi as i128) / 2) as i64
}

/// Solves `f(x) = target` for `x` in the open interval `domain`, where `f`
/// is strictly monotone (either direction).
///
/// Bisects on the ordered bit representation of `f64`, so half-lines and
/// the real line are handled without a change of variables and the search
/// finishes in at most 64 halvings when run to adjacent floats. Stops once
/// the bracket is below `ROOT_REL_TOL` relative width or after
/// `ROOT_MAX_ITER` halvings. The endpoints themselves are never evaluated.
pub fn invert_monotone<F>(f: F, target: f64, domain: Interval) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !target.is_finite() {
        return Err(Error::Inversion(format!("non-finite target {target}")));
    }
    let (k_lo0, k_hi0) = (key(domain.lo), key(domain.hi));
    if (k_hi0 as i128) - (k_lo0 as i128) < 2 {
        return Err(Error::Inversion(format!("empty interval {domain}")));
    }

    let quarter = (((k_hi0 as i128) - (k_lo0 as i128)) / 4) as i64;
    let (p, q) = (from_key(k_lo0 + quarter), from_key(k_hi0 - quarter));
    let (fp, fq) = (f(p), f(q));
    if fp.is_nan() || fq.is_nan() || fp == fq {
        return Err(Error::Inversion(format!(
            "cannot determine monotone direction on {domain}"
        )));
    }
    let increasing = fq > fp;

    let (mut k_lo, mut k_hi) = (k_lo0, k_hi0);
    for _ in 0..ROOT_MAX_ITER {
        if (k_hi as i128) - (k_lo as i128) <= 1 {
            break;
        }
        let (x_lo, x_hi) = (from_key(k_lo), from_key(k_hi));
        if x_lo.is_finite() && x_hi.is_finite() {
            let scale = x_lo.abs().max(x_hi.abs());
            if x_hi - x_lo <= ROOT_REL_TOL * scale {
                break;
            }
        }
        let mid = key_mid(k_lo, k_hi);
        let fm = f(from_key(mid));
        if fm.is_nan() {
            return Err(Error::Inversion(format!(
                "function is NaN at {}",
                from_key(mid)
            )));
        }
        if (fm < target) == increasing {
            k_lo = mid;
        } else {
            k_hi = mid;
        }
    }

    // A bracket that never left an endpoint means the target lies beyond
    // the range attained on the open interval.
    if k_lo == k_lo0 || k_hi == k_hi0 {
        return Err(Error::Inversion(format!(
            "target {target} is not attained on {domain}"
        )));
    }
    let (x_lo, x_hi) = (from_key(k_lo), from_key(k_hi));
    let x = if (f(x_lo) - target).abs() <= (f(x_hi) - target).abs() {
        x_lo
    } else {
        x_hi
    };
    Ok(x)
}
