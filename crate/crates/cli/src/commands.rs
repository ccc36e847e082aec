use std::fs;
use std::io::Write;
use std::path::Path;

use record_mle_core::estimators::{mle_theta_records, mle_theta_sample, plugin_cdf, plugin_pdf};
use record_mle_core::records::extract_lower_records;
use serde_json::json;

use crate::config::{CurveConfig, FamilySpec, Format, RunConfig};
use crate::curve;
use crate::error::CliError;
use crate::io::{read_column, read_estimation_input, write_records, EstimationInput};
use crate::verify;
use crate::{Command, CurveArgs, EstimateArgs, ExtractArgs, VerifyArgs};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::ExtractRecords(args) => extract_records(args),
        Command::Estimate(args) => estimate(args),
        Command::MseCurve(args) => mse_curve(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

fn extract_records(args: ExtractArgs) -> Result<(), CliError> {
    let values = read_column(&args.input, &args.column)?;
    let rec = extract_lower_records(&values)?;
    match &args.out {
        Some(path) => write_records(&rec, fs::File::create(path)?)?,
        None => write_records(&rec, std::io::stdout().lock())?,
    }
    eprintln!("m = {}, n = {}", rec.m(), values.len());
    Ok(())
}

fn estimate(args: EstimateArgs) -> Result<(), CliError> {
    let family = FamilySpec::new(args.family.family, args.family.alpha);
    let member = family.build()?;
    let input = read_estimation_input(&args.input)?;
    let est = match &input {
        EstimationInput::Sample(xs) => mle_theta_sample(&*member, xs)?,
        EstimationInput::Records(rec) => mle_theta_records(&*member, rec)?,
    };
    let plugins = args
        .at
        .iter()
        .map(|&x| {
            Ok(json!({
                "x": x,
                "pdf": plugin_pdf(&*member, &est, x)?,
                "cdf": plugin_cdf(&*member, &est, x)?,
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let run = RunConfig::Estimate {
        family,
        input: args.input,
        at: args.at,
    };
    let report = json!({
        "config": run,
        "results": {
            "theta_hat": est.theta_hat,
            "statistic_t": est.statistic_t,
            "size": est.size,
            "kind": est.kind,
            "family": est.member_name,
            "plugin": plugins,
        },
        "warnings": Vec::<String>::new(),
        "digest": run.digest(),
    });
    emit(args.out.as_deref(), &pretty(&report))
}

fn mse_curve(args: CurveArgs) -> Result<(), CliError> {
    let cfg = CurveConfig {
        family: FamilySpec::new(args.family.family, args.family.alpha),
        theta: args.theta,
        estimand: args.estimand,
        sizes: args.sizes,
        reps: args.reps,
        seed: args.seed,
        log_scale: args.log_scale,
    };
    let mut formats = args.format.clone();
    formats.dedup();
    if args.out.is_none() {
        if formats.contains(&Format::Svg) {
            return Err(CliError::Usage("--format svg needs --out".into()));
        }
        if formats.len() > 1 {
            return Err(CliError::Usage("several formats need --out".into()));
        }
    }
    let c = curve::compute(&cfg, args.lanes)?;
    for w in &c.warnings {
        eprintln!("warning: {w}");
    }
    for format in formats {
        let text = match format {
            Format::Csv => curve::to_csv(&c),
            Format::Json => pretty(&curve::to_json(&c)),
            Format::Svg => curve::to_svg(&c),
        };
        match &args.out {
            Some(base) => {
                let path = base.with_extension(format.extension());
                fs::write(&path, text)?;
                eprintln!("wrote {}", path.display());
            }
            None => emit(None, &text)?,
        }
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let results = verify::run(&args.section, args.seed, args.lanes)?;
    let failed = results.iter().filter(|r| !r.passed).count();
    for r in &results {
        eprintln!("{} {:>2} {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.section);
    }
    let run = RunConfig::Verify {
        section: args.section,
        seed: args.seed,
    };
    let report = json!({
        "config": run,
        "results": results,
        "warnings": Vec::<String>::new(),
        "digest": run.digest(),
    });
    emit(args.out.as_deref(), &pretty(&report))?;
    if failed > 0 {
        return Err(CliError::VerificationFailed {
            failed,
            total: results.len(),
        });
    }
    Ok(())
}
