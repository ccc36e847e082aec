//! MSE-versus-size curves: analytic values next to simulated ones.

use std::fmt::Write as _;

use record_mle_core::analytic::{
    gamma_expectation_quadrature, mse_cdf_plugin_series, mse_exp_theta_series, mse_pdf_plugin,
    mse_theta_power, ThetaMseForm,
};
use record_mle_core::family::{cdf, check_theta, check_x, pdf};
use record_mle_core::montecarlo::{mc_estimate, McSettings, Source};
use record_mle_core::{EstimandTransform, Family, MemberHandle};
use serde::Serialize;
use serde_json::json;

use crate::config::{CurveConfig, Estimand, RunConfig};
use crate::error::CliError;
use crate::svg::{self, Chart, Series};

pub const CSV_HEADER: &str =
    "n,analytic,verbatim,formal_series,mc_records_mse,mc_records_stderr,mc_sample_mse,mc_sample_stderr";

/// Thetas over which the records-versus-sample claim for `exp(θ)` is checked.
pub const FINDING_THETAS: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McCell {
    pub mse: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub analytic: Option<f64>,
    pub verbatim: Option<f64>,
    pub mc_records: Option<McCell>,
    pub mc_sample: Option<McCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeComparison {
    pub n: usize,
    pub sample_mse: f64,
    pub records_win: bool,
}

/// Formal MSE of `exp(θ̂)` from 2 records against samples of 5 to 8.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordsVsSample {
    pub theta: f64,
    pub records_m: usize,
    pub records_mse: f64,
    pub comparisons: Vec<SizeComparison>,
    pub records_win_all: bool,
}

/// Formal MSE from 15 records against a sample of 500.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeSample {
    pub theta: f64,
    pub records_m: usize,
    pub sample_n: usize,
    pub records_mse: f64,
    pub sample_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Findings {
    pub note: String,
    pub records_vs_sample: Vec<RecordsVsSample>,
    pub large_sample: Vec<LargeSample>,
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub config: CurveConfig,
    pub member_label: String,
    pub rows: Vec<CurveRow>,
    /// `exact`, `series`, `formal series`, `quadrature` or `none`.
    pub analytic_method: &'static str,
    pub warnings: Vec<String>,
    pub findings: Option<Findings>,
}

impl Curve {
    pub fn formal_series(&self) -> bool {
        self.config.estimand.is_formal()
    }
}

fn is_power(member: &dyn Family) -> bool {
    member.name() == "power"
}

/// `E[(B⁻¹(n/T) - θ)²]` with `T ~ Gamma(n, B(θ))`.
fn theta_mse_quadrature(member: &dyn Family, theta: f64, n: usize) -> record_mle_core::Result<f64> {
    let nf = n as f64;
    gamma_expectation_quadrature(
        |t| match member.b_inv(nf / t) {
            Ok(th) => (th - theta).powi(2),
            Err(_) => f64::NAN,
        },
        n,
        member.b(theta),
    )
}

fn transform(member: &MemberHandle, estimand: Estimand) -> EstimandTransform {
    match estimand {
        Estimand::Theta => EstimandTransform::identity(),
        Estimand::ExpTheta => EstimandTransform::exp(),
        Estimand::Pdf(x) => {
            let m = member.clone();
            EstimandTransform::custom(format!("pdf@{x}"), move |t| pdf(&*m, t, x).unwrap_or(f64::NAN))
        }
        Estimand::Cdf(x) => {
            let m = member.clone();
            EstimandTransform::custom(format!("cdf@{x}"), move |t| cdf(&*m, t, x).unwrap_or(f64::NAN))
        }
    }
}

fn formal_exp_mse(n: usize, theta: f64) -> Result<f64, CliError> {
    Ok(mse_exp_theta_series(n, theta)?.value)
}

pub fn exp_theta_findings() -> Result<Findings, CliError> {
    let mut records_vs_sample = Vec::new();
    let mut large_sample = Vec::new();
    for &theta in &FINDING_THETAS {
        let records_mse = formal_exp_mse(2, theta)?;
        let comparisons = (5..=8)
            .map(|n| {
                let sample_mse = formal_exp_mse(n, theta)?;
                Ok(SizeComparison {
                    n,
                    sample_mse,
                    records_win: records_mse < sample_mse,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        records_vs_sample.push(RecordsVsSample {
            theta,
            records_m: 2,
            records_mse,
            records_win_all: comparisons.iter().all(|c| c.records_win),
            comparisons,
        });
        large_sample.push(LargeSample {
            theta,
            records_m: 15,
            sample_n: 500,
            records_mse: formal_exp_mse(15, theta)?,
            sample_mse: formal_exp_mse(500, theta)?,
        });
    }
    Ok(Findings {
        note: "values are formal series; the true MSE of exp(theta_hat) is infinite, so these \
               comparisons are reported, not asserted"
            .into(),
        records_vs_sample,
        large_sample,
    })
}

/// Evaluates every size of the curve. `lanes` only changes how the
/// simulations are scheduled, never their results.
pub fn compute(cfg: &CurveConfig, lanes: usize) -> Result<Curve, CliError> {
    let member = cfg.family.build()?;
    check_theta(&*member, cfg.theta)?;
    let min = cfg.estimand.min_size();
    if let Some(&n) = cfg.sizes.sizes().first() {
        if n < min {
            return Err(CliError::Usage(format!(
                "estimand {} needs sizes of at least {min}, got {n}",
                cfg.estimand
            )));
        }
    }
    if let Estimand::Pdf(x) | Estimand::Cdf(x) = cfg.estimand {
        check_x(&*member, x)?;
    }

    let power = is_power(&*member);
    let mut warnings = Vec::new();
    let analytic_method = match cfg.estimand {
        Estimand::Theta if power => "exact",
        Estimand::Theta => "quadrature",
        Estimand::ExpTheta if power => "formal series",
        Estimand::ExpTheta => {
            warnings.push(format!(
                "no analytic MSE of exp(theta_hat) is available for {}; only simulations are shown",
                member.label()
            ));
            "none"
        }
        Estimand::Pdf(_) | Estimand::Cdf(_) => "series",
    };
    if cfg.estimand.is_formal() {
        warnings.push(
            "formal series: E[exp(2 theta_hat)] is infinite, so the true MSE of exp(theta_hat) does \
             not exist and the analytic column is a formal expansion"
                .into(),
        );
    }

    let tf = transform(&member, cfg.estimand);
    let settings = McSettings::new(cfg.reps, cfg.seed).with_lanes(lanes);
    let mut rows = Vec::with_capacity(cfg.sizes.sizes().len());
    let mut series_notes: Vec<String> = Vec::new();
    for &n in cfg.sizes.sizes() {
        let (analytic, verbatim) = match cfg.estimand {
            Estimand::Theta if power => (
                Some(mse_theta_power(n, cfg.theta, ThetaMseForm::Exact)?),
                Some(mse_theta_power(n, cfg.theta, ThetaMseForm::Verbatim)?),
            ),
            Estimand::Theta => (Some(theta_mse_quadrature(&*member, cfg.theta, n)?), None),
            Estimand::ExpTheta if power => (Some(formal_exp_mse(n, cfg.theta)?), None),
            Estimand::ExpTheta => (None, None),
            Estimand::Pdf(x) => {
                let eval = mse_pdf_plugin(&*member, cfg.theta, x, n)?;
                series_notes.extend(eval.warnings.into_iter().map(|w| format!("n = {n}: {w}")));
                (Some(eval.value), None)
            }
            Estimand::Cdf(x) => {
                let eval = mse_cdf_plugin_series(&*member, cfg.theta, x, n)?;
                series_notes.extend(eval.warnings.into_iter().map(|w| format!("n = {n}: {w}")));
                (Some(eval.value), None)
            }
        };
        let (mc_records, mc_sample) = if cfg.reps == 0 {
            (None, None)
        } else {
            let run = |source| -> Result<McCell, CliError> {
                let r = mc_estimate(&*member, cfg.theta, &tf, source, &settings)?;
                Ok(McCell {
                    mse: r.mse,
                    stderr: r.stderr_of_mse,
                })
            };
            (Some(run(Source::Records(n))?), Some(run(Source::Sample(n))?))
        };
        rows.push(CurveRow {
            n,
            analytic,
            verbatim,
            mc_records,
            mc_sample,
        });
    }
    // The pdf assembly note repeats for every size; keep one copy.
    let mut seen = std::collections::BTreeSet::new();
    for note in series_notes {
        let key = note.split_once(": ").map_or(note.clone(), |(_, rest)| rest.to_owned());
        if key.starts_with("assembled as") {
            if seen.insert(key.clone()) {
                warnings.push(key);
            }
        } else {
            warnings.push(note);
        }
    }

    if let Some(first) = rows.iter().find_map(|r| r.verbatim.map(|v| (r.n, v))) {
        let exact = rows.iter().find(|r| r.n == first.0).and_then(|r| r.analytic).unwrap_or(f64::NAN);
        warnings.push(format!(
            "the commonly quoted closed form theta^2 [n^2/((n-2)(n-1)) - 2n/(n-2) + 1] disagrees with \
             the moment-derived MSE theta^2 (n+2)/((n-1)(n-2)): at n = {} it gives {} instead of {}; \
             it is kept in the `verbatim` column for comparison",
            first.0, first.1, exact
        ));
    }
    if cfg.estimand == Estimand::ExpTheta && cfg.reps > 0 {
        warnings.push(
            "simulated MSE of exp(theta_hat) does not converge as reps grow; treat those columns as \
             diagnostics"
                .into(),
        );
    }
    let findings = if cfg.estimand == Estimand::ExpTheta && power {
        Some(exp_theta_findings()?)
    } else {
        None
    };
    Ok(Curve {
        config: cfg.clone(),
        member_label: member.label(),
        rows,
        analytic_method,
        warnings,
        findings,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv(curve: &Curve) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    let formal = curve.formal_series();
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.n,
            cell(r.analytic),
            cell(r.verbatim),
            formal,
            cell(r.mc_records.map(|c| c.mse)),
            cell(r.mc_records.map(|c| c.stderr)),
            cell(r.mc_sample.map(|c| c.mse)),
            cell(r.mc_sample.map(|c| c.stderr)),
        );
    }
    s
}

pub fn to_json(curve: &Curve) -> serde_json::Value {
    let run = RunConfig::MseCurve(curve.config.clone());
    json!({
        "config": run,
        "results": {
            "family": curve.member_label,
            "estimand": curve.config.estimand.to_string(),
            "analytic_method": curve.analytic_method,
            "formal_series": curve.formal_series(),
            "rows": curve.rows,
            "findings": curve.findings,
        },
        "warnings": curve.warnings,
        "digest": run.digest(),
    })
}

pub fn to_svg(curve: &Curve) -> String {
    let cfg = &curve.config;
    let analytic_label = match curve.analytic_method {
        "formal series" => "formal series".to_owned(),
        method => format!("analytic ({method})"),
    };
    let pick = |f: &dyn Fn(&CurveRow) -> Option<f64>| -> Vec<(f64, f64)> {
        curve.rows.iter().filter_map(|r| f(r).map(|v| (r.n as f64, v))).collect()
    };
    let mut series = Vec::new();
    let analytic = pick(&|r| r.analytic);
    if !analytic.is_empty() {
        series.push(Series {
            label: analytic_label,
            points: analytic,
            markers: false,
        });
    }
    let verbatim = pick(&|r| r.verbatim);
    if !verbatim.is_empty() {
        series.push(Series {
            label: "quoted closed form".into(),
            points: verbatim,
            markers: false,
        });
    }
    for (label, f) in [
        ("simulated, records", (|r: &CurveRow| r.mc_records.map(|c| c.mse)) as fn(&CurveRow) -> Option<f64>),
        ("simulated, sample", |r: &CurveRow| r.mc_sample.map(|c| c.mse)),
    ] {
        let points = pick(&f);
        if !points.is_empty() {
            series.push(Series {
                label: label.into(),
                points,
                markers: true,
            });
        }
    }
    let mut notes = Vec::new();
    if curve.formal_series() {
        notes.push("formal series: the true MSE of exp(theta_hat) is infinite".to_owned());
    }
    svg::render(&Chart {
        title: format!("MSE of {} for {}, theta = {}", cfg.estimand, curve.member_label, cfg.theta),
        x_label: "n (sample size or number of records)".into(),
        y_label: "MSE".into(),
        log_y: cfg.log_scale,
        series,
        notes,
    })
}
