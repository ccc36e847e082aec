//! Self-checks run by `record-mle verify`.
//!
//! Each check compares the library against an independent oracle (closed
//! forms, exact rational arithmetic, quadrature, simulation or a KS test)
//! and records what it measured.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use record_mle_core::analytic::{
    expectation_cdf_plugin_series, expectation_pdf_plugin_series, gamma_expectation_quadrature,
    gamma_ratio, mse_exp_theta_series, mse_theta_power, ThetaMseForm,
};
use record_mle_core::family::{cdf, pdf, Frechet, Gumbel, PowerFunction};
use record_mle_core::montecarlo::ks::{ks_gamma_gof, ks_two_sample};
use record_mle_core::montecarlo::{
    consistency_curve, mc_estimate, mc_plugin_curve, replication_rng, theta_hat_draws, McSettings,
    PluginTarget, Source,
};
use record_mle_core::records::simulate_lower_records_with;
use record_mle_core::{EstimandTransform, Family};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CurveConfig, FamilySpec};
use crate::curve;
use crate::error::CliError;

/// Section names in run order.
pub const SECTIONS: [&str; 10] = [
    "mse-exact",
    "equal-in-law",
    "record-law",
    "cdf-bias-series",
    "asymptotic-bias",
    "consistency",
    "ratio-limit",
    "exp-series",
    "determinism",
    "mse-shape",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub section: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub measured: Value,
}

type Outcome = Result<(bool, Value), CliError>;

struct Ctx {
    seed: u64,
    lanes: usize,
}

impl Ctx {
    fn settings(&self, reps: usize) -> McSettings {
        McSettings::new(reps, self.seed).with_lanes(self.lanes)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn mse_exact(ctx: &Ctx) -> Outcome {
    let power = PowerFunction;
    let mut passed = true;
    let mut rows = Vec::new();
    for n in [3usize, 5, 10, 30] {
        let nf = n as f64;
        let closed = (nf + 2.0) / ((nf - 1.0) * (nf - 2.0));
        let exact = mse_theta_power(n, 1.0, ThetaMseForm::Exact)?;
        let r = mc_estimate(
            &power,
            1.0,
            &EstimandTransform::identity(),
            Source::Sample(n),
            &ctx.settings(100_000),
        )?;
        let ok = rel_err(exact, closed) < 1e-12 && (r.mse - exact).abs() <= 3.0 * r.stderr_of_mse;
        passed &= ok;
        rows.push(json!({"n": n, "exact": exact, "mc_mse": r.mse, "mc_stderr": r.stderr_of_mse, "ok": ok}));
    }
    let at3 = mse_theta_power(3, 1.0, ThetaMseForm::Exact)?;
    let verbatim3 = mse_theta_power(3, 1.0, ThetaMseForm::Verbatim)?;
    let c = curve::compute(
        &CurveConfig {
            family: FamilySpec::new("power", None),
            theta: 1.0,
            estimand: "theta".parse().map_err(CliError::Usage)?,
            sizes: "3..5".parse().map_err(CliError::Usage)?,
            reps: 0,
            seed: ctx.seed,
            log_scale: false,
        },
        ctx.lanes,
    )?;
    let reported = c.warnings.iter().any(|w| w.contains("disagrees"));
    passed &= (at3 - 2.5).abs() < 1e-12 && verbatim3 < 0.0 && reported;
    Ok((
        passed,
        json!({"sizes": rows, "exact_at_3": at3, "quoted_form_at_3": verbatim3, "discrepancy_reported": reported}),
    ))
}

fn equal_in_law(ctx: &Ctx) -> Outcome {
    let members: Vec<Box<dyn Family>> = vec![
        Box::new(PowerFunction),
        Box::new(Gumbel),
        Box::new(Frechet::new(2.0)?),
    ];
    let mut passed = true;
    let mut rows = Vec::new();
    for m in &members {
        let s = theta_hat_draws(&**m, 1.0, Source::Sample(8), &ctx.settings(10_000))?;
        let r = theta_hat_draws(&**m, 1.0, Source::Records(8), &ctx.settings(10_000))?;
        let ks = ks_two_sample(&s, &r)?;
        passed &= ks.p_value > 0.01;
        rows.push(json!({"family": m.label(), "ks_statistic": ks.statistic, "p_value": ks.p_value}));
    }
    Ok((passed, json!(rows)))
}

fn record_law(ctx: &Ctx) -> Outcome {
    let power = PowerFunction;
    let key = (3u64 << 40) | 5;
    let data = (0..10_000u64)
        .map(|rep| {
            let mut rng = replication_rng(ctx.seed, key, rep);
            let rec = simulate_lower_records_with(&power, 2.0, 5, &mut rng)?;
            Ok(power.a(rec.last()))
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    let ks = ks_gamma_gof(&data, 5, 2.0)?;
    Ok((ks.p_value > 0.01, json!({"ks_statistic": ks.statistic, "p_value": ks.p_value})))
}

/// `Σ_{i<m} (-c)^i Γ(m-i) / (Γ(m) i!)` in exact arithmetic for integer `c`.
fn cdf_expectation_rational(m: usize, c: i64) -> BigRational {
    let mut total = BigRational::zero();
    // Γ(m-i)/Γ(m) / i! built up term by term.
    let mut coef = BigRational::one();
    for i in 0..m {
        if i > 0 {
            coef = coef * BigRational::from_integer(BigInt::from(-c))
                / BigRational::from_integer(BigInt::from(((m - i) * i) as i64));
        }
        total += coef.clone();
    }
    total
}

fn cdf_bias_series(ctx: &Ctx) -> Outcome {
    let power = PowerFunction;
    let m = 5usize;
    let a: f64 = 0.2;
    let x = (-a).exp();
    let series = expectation_cdf_plugin_series(&power, 1.0, x, m)?.value;
    let exact = cdf_expectation_rational(m, 1);
    let target = BigRational::new(BigInt::from(453), BigInt::from(576));
    let quad = gamma_expectation_quadrature(|t| (-(m as f64) * a / t).exp(), m, 1.0)?;
    let curve = mc_plugin_curve(&power, 1.0, m, &[x], PluginTarget::Cdf, &ctx.settings(10_000))?;
    let mc = &curve[0];
    let mc_tol = (3.0 * mc.stderr_of_bias).max(1e-2);
    let passed = exact == target
        && (series - 453.0 / 576.0).abs() < 1e-12
        && (quad - series).abs() < 1e-2
        && (mc.mean - series).abs() <= mc_tol;
    Ok((
        passed,
        json!({
            "series": series,
            "rational": exact.to_string(),
            "quadrature": quad,
            "mc_mean": mc.mean,
            "mc_tolerance": mc_tol,
        }),
    ))
}

fn asymptotic_bias(_: &Ctx) -> Outcome {
    let power = PowerFunction;
    let mut passed = true;
    let mut out = serde_json::Map::new();

    let x = 0.8;
    let a = power.a(x);
    let f = cdf(&power, 1.0, x)?;
    let series = |m| expectation_cdf_plugin_series(&power, 1.0, x, m).map(|e| e.value);
    let quad = |m: usize| gamma_expectation_quadrature(|t| (-(m as f64) * a / t).exp(), m, 1.0);
    let (s10, s80, q10, q80) = (series(10)?, series(80)?, quad(10)?, quad(80)?);
    passed &= (s80 - f).abs() < (s10 - f).abs() && (s80 - f).abs() < 0.02 * f;
    passed &= (q80 - f).abs() < (q10 - f).abs() && (q80 - f).abs() < 0.02 * f;
    out.insert(
        "cdf".into(),
        json!({"x": x, "truth": f, "series_error_10": s10 - f, "series_error_80": s80 - f,
               "quadrature_error_10": q10 - f, "quadrature_error_80": q80 - f}),
    );

    let x = 0.5;
    let a = power.a(x);
    let slope = -power.a_prime(x);
    let f = pdf(&power, 1.0, x)?;
    let series = |m| expectation_pdf_plugin_series(&power, 1.0, x, m).map(|e| e.value);
    let quad = |m: usize| {
        let mf = m as f64;
        gamma_expectation_quadrature(|t| mf / t * slope * (-mf * a / t).exp(), m, 1.0)
    };
    let (s10, s80, q10, q80) = (series(10)?, series(80)?, quad(10)?, quad(80)?);
    passed &= (s80 - f).abs() < (s10 - f).abs() && (s80 - f).abs() < 0.02 * f;
    passed &= (q80 - f).abs() < (q10 - f).abs() && (q80 - f).abs() < 0.02 * f;
    out.insert(
        "pdf".into(),
        json!({"x": x, "truth": f, "series_error_10": s10 - f, "series_error_80": s80 - f,
               "quadrature_error_10": q10 - f, "quadrature_error_80": q80 - f}),
    );
    Ok((passed, Value::Object(out)))
}

fn consistency(ctx: &Ctx) -> Outcome {
    let power = PowerFunction;
    let table = consistency_curve(&power, 1.0, &[0.2], &[10, 40], &ctx.settings(10_000))?;
    let r10 = table.rate(10, 0.2).unwrap_or(f64::NAN);
    let r40 = table.rate(40, 0.2).unwrap_or(f64::NAN);
    let grid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let at5 = mc_plugin_curve(&power, 1.0, 5, &grid, PluginTarget::Cdf, &ctx.settings(10_000))?;
    let at40 = mc_plugin_curve(&power, 1.0, 40, &grid, PluginTarget::Cdf, &ctx.settings(10_000))?;
    let shrinks = at5.iter().zip(&at40).all(|(a, b)| b.mse < a.mse);
    let points: Vec<Value> = at5
        .iter()
        .zip(&at40)
        .map(|(a, b)| json!({"x": a.x, "mse_5": a.mse, "mse_40": b.mse}))
        .collect();
    Ok((
        r40 <= 0.5 * r10 && shrinks,
        json!({"exceedance_10": r10, "exceedance_40": r40, "cdf_mse": points}),
    ))
}

fn ratio_limit(_: &Ctx) -> Outcome {
    let mut passed = true;
    let mut at_million = Vec::new();
    for i in 0..=3usize {
        let r = gamma_ratio(1_000_000, i)?;
        let n = 1e6f64;
        let direct: f64 = (1..=i + 1).map(|j| n / (n - j as f64)).product();
        passed &= (1.0..=1.00002).contains(&r) && rel_err(r, direct) < 1e-12;
        at_million.push(json!({"i": i, "ratio": r}));
    }
    let along: Vec<f64> = [100usize, 1_000, 10_000, 100_000, 1_000_000]
        .iter()
        .map(|&n| gamma_ratio(n, 1))
        .collect::<Result<_, _>>()?;
    passed &= along.windows(2).all(|w| w[1] < w[0]);
    Ok((passed, json!({"n_million": at_million, "i1_along_n": along})))
}

/// Formal exp-theta series in exact rational arithmetic, with `θ` and
/// `e^θ` taken at their `f64` values.
pub fn exp_theta_series_rational(n: usize, theta: f64) -> f64 {
    let th = BigRational::from_float(theta).expect("finite theta");
    let e = BigRational::from_float(theta.exp()).expect("finite e^theta");
    let two = BigRational::from_integer(BigInt::from(2));
    let nth = BigRational::from_integer(BigInt::from(n)) * th;
    let mut coef = BigRational::one();
    let mut pow2 = BigRational::one();
    let mut total = BigRational::zero();
    for i in 0..n {
        if i > 0 {
            coef = coef * &nth / BigRational::from_integer(BigInt::from((n - i) * i));
            pow2 *= &two;
        }
        total += &coef * (&pow2 - &two * &e);
    }
    total += &e * &e;
    total.to_f64().unwrap_or(f64::NAN)
}

fn exp_series(ctx: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    for &theta in &curve::FINDING_THETAS {
        for n in 1..=50 {
            let v = mse_exp_theta_series(n, theta)?.value;
            worst = worst.max(rel_err(v, exp_theta_series_rational(n, theta)));
        }
    }
    let c = curve::compute(
        &CurveConfig {
            family: FamilySpec::new("power", None),
            theta: 1.0,
            estimand: "exp-theta".parse().map_err(CliError::Usage)?,
            sizes: "1..30".parse().map_err(CliError::Usage)?,
            reps: 0,
            seed: ctx.seed,
            log_scale: false,
        },
        ctx.lanes,
    )?;
    let csv_flagged = curve::to_csv(&c).lines().skip(1).all(|l| l.split(',').nth(3) == Some("true"));
    let svg_flagged = curve::to_svg(&c).contains("formal series");
    let findings = c.findings.as_ref().map(|f| f.records_vs_sample.len()).unwrap_or(0);
    Ok((
        worst < 1e-12 && csv_flagged && svg_flagged && findings > 0,
        json!({
            "max_relative_error": worst,
            "csv_flagged": csv_flagged,
            "svg_flagged": svg_flagged,
            "finding_thetas": findings,
            "findings": c.findings,
        }),
    ))
}

fn determinism(ctx: &Ctx) -> Outcome {
    let cfg = CurveConfig {
        family: FamilySpec::new("power", None),
        theta: 1.0,
        estimand: "theta".parse().map_err(CliError::Usage)?,
        sizes: "3..12".parse().map_err(CliError::Usage)?,
        reps: 2_000,
        seed: ctx.seed,
        log_scale: false,
    };
    let one = curve::to_csv(&curve::compute(&cfg, 1)?);
    let again = curve::to_csv(&curve::compute(&cfg, 1)?);
    let four = curve::to_csv(&curve::compute(&cfg, 4)?);
    Ok((
        one == again && one == four,
        json!({"bytes": one.len(), "repeat_identical": one == again, "lanes_identical": one == four}),
    ))
}

fn mse_shape(ctx: &Ctx) -> Outcome {
    let c = curve::compute(
        &CurveConfig {
            family: FamilySpec::new("power", None),
            theta: 1.0,
            estimand: "theta".parse().map_err(CliError::Usage)?,
            sizes: "3..300".parse().map_err(CliError::Usage)?,
            reps: 0,
            seed: ctx.seed,
            log_scale: false,
        },
        ctx.lanes,
    )?;
    let values: Vec<f64> = c.rows.iter().map(|r| r.analytic.unwrap_or(f64::NAN)).collect();
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let last = *values.last().unwrap_or(&f64::NAN);
    let worst = c
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            rel_err(r.analytic.unwrap_or(f64::NAN), (n + 2.0) / ((n - 1.0) * (n - 2.0)))
        })
        .fold(0.0, f64::max);
    Ok((
        decreasing && last < 0.01 && worst < 1e-12,
        json!({"strictly_decreasing": decreasing, "at_300": last, "max_relative_error": worst}),
    ))
}

const DESCRIPTIONS: [&str; 10] = [
    "simulated MSE of theta_hat matches theta^2 (n+2)/((n-1)(n-2)); the quoted form is negative at n = 3 and flagged",
    "theta_hat from 8 sample values and from 8 records agree in law (two-sample KS)",
    "A of the 5th record is Gamma(5, rate 2) for the power family with theta = 2 (KS)",
    "E[F_hat] series at m = 5, m A B = 1 equals 453/576 and agrees with quadrature and simulation",
    "plug-in CDF and PDF bias shrinks from m = 10 to m = 80 and is below 2% at m = 80",
    "exceedance rate halves from m = 10 to m = 40; CDF plug-in MSE drops from m = 5 to m = 40",
    "the gamma ratio is within [1, 1.00002] at n = 1e6 and decreases in n",
    "exp-theta series matches exact rational arithmetic; curve is flagged formal with findings",
    "curve CSV is byte-identical across repeats and worker counts",
    "analytic MSE of theta_hat decreases strictly over n = 3..300 and ends below 0.01",
];

type CheckFn = fn(&Ctx) -> Outcome;

const CHECKS: [CheckFn; 10] = [
    mse_exact,
    equal_in_law,
    record_law,
    cdf_bias_series,
    asymptotic_bias,
    consistency,
    ratio_limit,
    exp_series,
    determinism,
    mse_shape,
];

/// Runs one section (or `all`). Errors inside a check count as failures.
pub fn run(section: &str, seed: u64, lanes: usize) -> Result<Vec<CheckResult>, CliError> {
    if section != "all" && !SECTIONS.contains(&section) {
        return Err(CliError::Usage(format!(
            "unknown section `{section}` (expected all, {})",
            SECTIONS.join(", ")
        )));
    }
    let ctx = Ctx { seed, lanes };
    Ok(SECTIONS
        .iter()
        .enumerate()
        .filter(|(_, &name)| section == "all" || section == name)
        .map(|(i, &name)| {
            let (passed, measured) = match CHECKS[i](&ctx) {
                Ok(v) => v,
                Err(e) => (false, json!({"error": e.to_string()})),
            };
            CheckResult {
                id: i + 1,
                section: name,
                description: DESCRIPTIONS[i],
                passed,
                measured,
            }
        })
        .collect())
}
