//! Simulation counterparts of the analytic results: empirical bias and MSE
//! of the estimators, exceedance probabilities, and the KS tests used to
//! compare distributions.
//!
//! Replication `r` of a run draws from its own ChaCha8 stream, selected by
//! `r` on a generator keyed by the seed and the experiment. Replications are
//! collected in index order and reduced single-threaded, so a report does
//! not depend on how many worker lanes computed it.

pub mod ks;

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{
    mle_theta_records, mle_theta_sample, plugin_cdf, plugin_pdf, EstimandTransform, TransformKind,
};
use crate::family::{cdf, check_theta, pdf, sample_iid_with, Family};
use crate::numerics::summation::pairwise_sum;
use crate::records::simulate_lower_records_with;

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const MIN_ESTIMATE_REPS: usize = 100;
pub const MIN_CURVE_REPS: usize = 1000;
/// Largest tolerated fraction of failed replications.
pub const MAX_FAILURE_RATE: f64 = 0.01;
/// Fraction cut from each end for the trimmed mean.
pub const TRIM_FRACTION: f64 = 0.1;

/// Where each replication's estimate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// An i.i.d. sample of size `n`.
    Sample(usize),
    /// The first `m` lower records, simulated directly.
    Records(usize),
}

impl Source {
    pub fn size(self) -> usize {
        match self {
            Source::Sample(n) | Source::Records(n) => n,
        }
    }

    fn stream_key(self) -> u64 {
        match self {
            Source::Sample(n) => (1 << 40) | n as u64,
            Source::Records(m) => (2 << 40) | m as u64,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Sample(n) => write!(f, "sample({n})"),
            Source::Records(m) => write!(f, "records({m})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub reps: usize,
    pub seed: u64,
    /// Worker threads; 0 uses rayon's default. Never affects results.
    pub lanes: usize,
}

impl McSettings {
    pub fn new(reps: usize, seed: u64) -> Self {
        Self { reps, seed, lanes: 0 }
    }

    pub fn with_lanes(mut self, lanes: usize) -> Self {
        self.lanes = lanes;
        self
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self::new(10_000, DEFAULT_SEED)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for replication `rep` of the experiment identified by `key`.
pub fn replication_rng(seed: u64, key: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(key)));
    rng.set_stream(rep);
    rng
}

/// Runs `f` once per replication and returns the successes in replication
/// order, or [`Error::RunFailed`] if too many replications fail.
fn replicate<T, F>(settings: &McSettings, key: u64, f: F) -> Result<(Vec<T>, usize)>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let run = || {
        (0..settings.reps)
            .into_par_iter()
            .map(|rep| f(&mut replication_rng(settings.seed, key, rep as u64)))
            .collect::<Vec<_>>()
    };
    let outcomes = if settings.lanes == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(settings.lanes)
            .build()
            .map_err(|e| Error::Argument(format!("cannot start {} worker lanes: {e}", settings.lanes)))?
            .install(run)
    };
    let mut values = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    let mut first = None;
    for outcome in outcomes {
        match outcome {
            Ok(v) => values.push(v),
            Err(e) => {
                failures += 1;
                first.get_or_insert(e);
            }
        }
    }
    if failures as f64 > MAX_FAILURE_RATE * settings.reps as f64 {
        return Err(Error::RunFailed {
            failures,
            reps: settings.reps,
            first: first.map(|e| e.to_string()).unwrap_or_default(),
        });
    }
    Ok((values, failures))
}

fn check_reps(reps: usize, min: usize) -> Result<()> {
    if reps < min {
        Err(Error::Argument(format!("at least {min} replications are required, got {reps}")))
    } else {
        Ok(())
    }
}

fn estimate_once(
    member: &dyn Family,
    theta: f64,
    source: Source,
    rng: &mut ChaCha8Rng,
) -> Result<crate::estimators::EstimateResult> {
    match source {
        Source::Sample(n) => mle_theta_sample(member, &sample_iid_with(member, theta, n, rng)?),
        Source::Records(m) => {
            mle_theta_records(member, &simulate_lower_records_with(member, theta, m, rng)?)
        }
    }
}

/// `reps` independent draws of θ̂ from the given source.
pub fn theta_hat_draws(
    member: &dyn Family,
    theta: f64,
    source: Source,
    settings: &McSettings,
) -> Result<Vec<f64>> {
    check_theta(member, theta)?;
    if source.size() == 0 {
        return Err(Error::Argument("source size must be at least 1".into()));
    }
    let (draws, _) = replicate(settings, source.stream_key(), |rng| {
        estimate_once(member, theta, source, rng).map(|e| e.theta_hat)
    })?;
    Ok(draws)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exceedance {
    pub threshold: f64,
    pub rate: f64,
}

/// Statistics that stay meaningful when the second moment does not exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustSummary {
    pub median: f64,
    pub trimmed_mean: f64,
    /// `P(|γ(θ̂) - γ(θ)| > t)` for thresholds relative to `|γ(θ)|`.
    pub exceedance_rates: Vec<Exceedance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub mean: f64,
    pub bias: f64,
    pub mse: f64,
    pub stderr_of_mse: f64,
    pub reps: usize,
    pub seed: u64,
    pub estimand: String,
    pub config_digest: String,
    pub robust: Option<RobustSummary>,
    pub failures: usize,
    pub warnings: Vec<String>,
}

/// Mean, MSE about `target`, and the standard error of the MSE from the
/// sample variance of the squared errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMoments {
    pub mean: f64,
    pub mse: f64,
    pub stderr_of_mse: f64,
    pub stderr_of_mean: f64,
}

pub fn error_moments(values: &[f64], target: f64) -> ErrorMoments {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - target).powi(2)).collect();
    let mse = pairwise_sum(&sq) / n;
    let spread = |xs: &[f64], centre: f64| -> f64 {
        if !centre.is_finite() {
            return f64::INFINITY;
        }
        let dev: Vec<f64> = xs.iter().map(|x| (x - centre).powi(2)).collect();
        (pairwise_sum(&dev) / (n - 1.0) / n).sqrt()
    };
    ErrorMoments {
        mean,
        mse,
        stderr_of_mse: spread(&sq, mse),
        stderr_of_mean: spread(values, mean),
    }
}

fn robust_summary(values: &[f64], target: f64) -> RobustSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let cut = (TRIM_FRACTION * n as f64).floor() as usize;
    let kept = &sorted[cut..n - cut];
    let trimmed_mean = pairwise_sum(kept) / kept.len() as f64;
    let exceedance_rates = [0.1, 0.5, 1.0]
        .iter()
        .map(|&f| {
            let threshold = f * target.abs();
            let count = values.iter().filter(|v| (*v - target).abs() > threshold).count();
            Exceedance {
                threshold,
                rate: count as f64 / n as f64,
            }
        })
        .collect();
    RobustSummary {
        median,
        trimmed_mean,
        exceedance_rates,
    }
}

/// Hex SHA-256 of a canonical configuration string.
pub fn digest_hex(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Empirical mean, bias and MSE of `γ(θ̂)` as an estimate of `γ(θ)`.
///
/// For the `exp` transform the MSE usually does not exist, so the report
/// also carries a robust summary and a warning saying so.
pub fn mc_estimate(
    member: &dyn Family,
    theta: f64,
    transform: &EstimandTransform,
    source: Source,
    settings: &McSettings,
) -> Result<McReport> {
    check_theta(member, theta)?;
    check_reps(settings.reps, MIN_ESTIMATE_REPS)?;
    if source.size() == 0 {
        return Err(Error::Argument("source size must be at least 1".into()));
    }
    let (draws, failures) = replicate(settings, source.stream_key(), |rng| {
        estimate_once(member, theta, source, rng).map(|e| transform.apply(e.theta_hat))
    })?;
    let target = transform.apply(theta);
    let moments = error_moments(&draws, target);
    let estimand = format!("{}(theta) of {} from {source}", transform.name(), member.label());
    let canonical = format!(
        "mc_estimate;member={};theta={theta:?};transform={};source={source};reps={};seed={}",
        member.label(),
        transform.name(),
        settings.reps,
        settings.seed
    );
    let mut warnings = Vec::new();
    if failures > 0 {
        warnings.push(format!("{failures} of {} replications failed and were dropped", settings.reps));
    }
    let robust = if transform.kind() == TransformKind::Exp {
        warnings.push(
            "the true MSE of exp(theta_hat) is infinite; mse and its standard error do not converge \
             as reps grow, use the robust summary"
                .into(),
        );
        Some(robust_summary(&draws, target))
    } else {
        None
    };
    Ok(McReport {
        mean: moments.mean,
        bias: moments.mean - target,
        mse: moments.mse,
        stderr_of_mse: moments.stderr_of_mse,
        reps: settings.reps,
        seed: settings.seed,
        estimand,
        config_digest: digest_hex(&canonical),
        robust,
        failures,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PluginTarget {
    Pdf,
    Cdf,
}

impl fmt::Display for PluginTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PluginTarget::Pdf => "pdf",
            PluginTarget::Cdf => "cdf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PluginPoint {
    pub x: f64,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub stderr_of_bias: f64,
    pub mse: f64,
    pub stderr_of_mse: f64,
}

/// Per-point empirical bias and MSE of the record-based plug-in PDF or CDF.
pub fn mc_plugin_curve(
    member: &dyn Family,
    theta: f64,
    m: usize,
    x_grid: &[f64],
    which: PluginTarget,
    settings: &McSettings,
) -> Result<Vec<PluginPoint>> {
    check_theta(member, theta)?;
    check_reps(settings.reps, MIN_CURVE_REPS)?;
    if m == 0 {
        return Err(Error::Argument("number of records must be at least 1".into()));
    }
    if x_grid.is_empty() {
        return Err(Error::Argument("x grid must not be empty".into()));
    }
    let truths = x_grid
        .iter()
        .map(|&x| match which {
            PluginTarget::Pdf => pdf(member, theta, x),
            PluginTarget::Cdf => cdf(member, theta, x),
        })
        .collect::<Result<Vec<_>>>()?;
    let source = Source::Records(m);
    let (rows, _) = replicate(settings, source.stream_key(), |rng| {
        let est = estimate_once(member, theta, source, rng)?;
        x_grid
            .iter()
            .map(|&x| match which {
                PluginTarget::Pdf => plugin_pdf(member, &est, x),
                PluginTarget::Cdf => plugin_cdf(member, &est, x),
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(x_grid
        .iter()
        .zip(&truths)
        .enumerate()
        .map(|(j, (&x, &truth))| {
            let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            let mo = error_moments(&column, truth);
            PluginPoint {
                x,
                truth,
                mean: mo.mean,
                bias: mo.mean - truth,
                stderr_of_bias: mo.stderr_of_mean,
                mse: mo.mse,
                stderr_of_mse: mo.stderr_of_mse,
            }
        })
        .collect())
}

/// `P̂(|θ̂_m - θ| > ε)` for every record count and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyTable {
    pub epsilons: Vec<f64>,
    pub m_grid: Vec<usize>,
    /// `rates[i][j]` is the rate for `m_grid[i]` and `epsilons[j]`.
    pub rates: Vec<Vec<f64>>,
    pub reps: usize,
    pub seed: u64,
}

impl ConsistencyTable {
    pub fn rate(&self, m: usize, eps: f64) -> Option<f64> {
        let i = self.m_grid.iter().position(|&v| v == m)?;
        let j = self.epsilons.iter().position(|&v| v == eps)?;
        Some(self.rates[i][j])
    }
}

pub fn consistency_curve(
    member: &dyn Family,
    theta: f64,
    epsilons: &[f64],
    m_grid: &[usize],
    settings: &McSettings,
) -> Result<ConsistencyTable> {
    check_theta(member, theta)?;
    check_reps(settings.reps, MIN_CURVE_REPS)?;
    if m_grid.is_empty() || m_grid[0] == 0 || m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument(format!(
            "m grid must be non-empty, positive and strictly increasing, got {m_grid:?}"
        )));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Argument(format!("tolerances must be positive, got {epsilons:?}")));
    }
    let rates = m_grid
        .iter()
        .map(|&m| {
            let draws = theta_hat_draws(member, theta, Source::Records(m), settings)?;
            Ok(epsilons
                .iter()
                .map(|&eps| {
                    let hits = draws.iter().filter(|t| (*t - theta).abs() > eps).count();
                    hits as f64 / draws.len() as f64
                })
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(ConsistencyTable {
        epsilons: epsilons.to_vec(),
        m_grid: m_grid.to_vec(),
        rates,
        reps: settings.reps,
        seed: settings.seed,
    })
}
