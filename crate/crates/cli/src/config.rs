//! Run configurations and their digests.
//!
//! A config serializes to canonical JSON (fixed field order, shortest
//! round-trip floats), so parsing it back gives the same value and the
//! digest of the canonical text identifies the experiment. Output locations
//! are kept apart from the experiment so that writing the same run to two
//! places gives the same digest.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use record_mle_core::montecarlo::digest_hex;
use record_mle_core::{FamilyRegistry, MemberHandle, MemberParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    #[serde(flatten)]
    pub params: MemberParams,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>, alpha: Option<f64>) -> Self {
        Self {
            name: name.into(),
            params: MemberParams { alpha },
        }
    }

    pub fn build(&self) -> Result<MemberHandle, CliError> {
        if self.name != "frechet" && self.params.alpha.is_some() {
            return Err(CliError::Usage(format!("--alpha only applies to frechet, not {}", self.name)));
        }
        FamilyRegistry::with_builtins()
            .build(&self.name, &self.params)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// What an MSE curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Estimand {
    Theta,
    ExpTheta,
    Pdf(f64),
    Cdf(f64),
}

impl Estimand {
    /// Smallest size for which the analytic column exists.
    pub fn min_size(self) -> usize {
        match self {
            Estimand::Theta | Estimand::Pdf(_) => 3,
            Estimand::ExpTheta | Estimand::Cdf(_) => 1,
        }
    }

    pub fn is_formal(self) -> bool {
        matches!(self, Estimand::ExpTheta)
    }
}

impl fmt::Display for Estimand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimand::Theta => f.write_str("theta"),
            Estimand::ExpTheta => f.write_str("exp-theta"),
            Estimand::Pdf(x) => write!(f, "pdf@{x}"),
            Estimand::Cdf(x) => write!(f, "cdf@{x}"),
        }
    }
}

impl FromStr for Estimand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let point = |rest: &str| {
            rest.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad evaluation point in `{s}`"))
        };
        match s {
            "theta" => Ok(Estimand::Theta),
            "exp-theta" => Ok(Estimand::ExpTheta),
            _ => {
                if let Some(rest) = s.strip_prefix("pdf@") {
                    Ok(Estimand::Pdf(point(rest)?))
                } else if let Some(rest) = s.strip_prefix("cdf@") {
                    Ok(Estimand::Cdf(point(rest)?))
                } else {
                    Err(format!("unknown estimand `{s}` (expected theta, exp-theta, pdf@X or cdf@X)"))
                }
            }
        }
    }
}

impl TryFrom<String> for Estimand {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Estimand> for String {
    fn from(e: Estimand) -> Self {
        e.to_string()
    }
}

/// Sizes to evaluate: `a..b` (inclusive), `a..b:step`, or a comma list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SizeRange {
    text: String,
    sizes: Vec<usize>,
}

impl SizeRange {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a non-negative integer in range `{s}`"))
        };
        let sizes = if let Some((lo, rest)) = s.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (num(hi)?, num(step)?),
                None => (num(rest)?, 1),
            };
            let lo = num(lo)?;
            if step == 0 || hi < lo {
                return Err(format!("empty or invalid range `{s}`"));
            }
            (lo..=hi).step_by(step).collect()
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("sizes in `{s}` must be non-empty and strictly increasing"));
        }
        Ok(Self {
            text: s.to_owned(),
            sizes,
        })
    }
}

impl TryFrom<String> for SizeRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SizeRange> for String {
    fn from(r: SizeRange) -> Self {
        r.text
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfig {
    pub family: FamilySpec,
    pub theta: f64,
    pub estimand: Estimand,
    pub sizes: SizeRange,
    /// 0 skips the simulation columns.
    pub reps: usize,
    pub seed: u64,
    pub log_scale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

/// The experiment part of every command, which is what gets digested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    ExtractRecords {
        input: PathBuf,
        column: String,
    },
    Estimate {
        family: FamilySpec,
        input: PathBuf,
        at: Vec<f64>,
    },
    MseCurve(CurveConfig),
    Verify {
        section: String,
        seed: u64,
    },
}

impl RunConfig {
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("configs always serialize")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))
    }

    pub fn digest(&self) -> String {
        digest_hex(&self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn estimand_text_round_trips() {
        for s in ["theta", "exp-theta", "pdf@0.5", "cdf@0.999", "cdf@1e-7"] {
            let e: Estimand = s.parse().unwrap();
            assert_eq!(e.to_string().parse::<Estimand>().unwrap(), e);
        }
        for bad in ["", "mean", "pdf@", "cdf@x", "pdf@inf"] {
            assert!(bad.parse::<Estimand>().is_err(), "{bad}");
        }
    }

    #[test]
    fn size_ranges() {
        assert_eq!("3..6".parse::<SizeRange>().unwrap().sizes(), &[3, 4, 5, 6]);
        assert_eq!("3..9:3".parse::<SizeRange>().unwrap().sizes(), &[3, 6, 9]);
        assert_eq!("5,6,8".parse::<SizeRange>().unwrap().sizes(), &[5, 6, 8]);
        assert_eq!("7".parse::<SizeRange>().unwrap().sizes(), &[7]);
        for bad in ["", "6..3", "3..9:0", "a..4", "5,5", "3,2"] {
            assert!(bad.parse::<SizeRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn family_spec_builds() {
        assert_eq!(FamilySpec::new("power", None).build().unwrap().name(), "power");
        assert!(FamilySpec::new("power", Some(2.0)).build().is_err());
        assert!(FamilySpec::new("frechet", None).build().is_err());
        assert!(FamilySpec::new("nope", None).build().is_err());
        let f = FamilySpec::new("frechet", Some(2.0)).build().unwrap();
        assert_eq!(f.label(), "frechet(alpha=2)");
    }

    fn arb_estimand() -> impl Strategy<Value = Estimand> {
        prop_oneof![
            Just(Estimand::Theta),
            Just(Estimand::ExpTheta),
            (-1e6f64..1e6).prop_map(Estimand::Pdf),
            any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Estimand::Cdf),
        ]
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        let family = prop_oneof![
            Just(FamilySpec::new("power", None)),
            Just(FamilySpec::new("gumbel", None)),
            (1e-3f64..50.0).prop_map(|a| FamilySpec::new("frechet", Some(a))),
        ];
        prop_oneof![
            (family.clone(), any::<f64>().prop_filter("finite", |x| x.is_finite()), arb_estimand(), 1usize..50, 0usize..40, 1usize..4, 0usize..100_000, any::<u64>(), any::<bool>())
                .prop_map(|(family, theta, estimand, lo, span, step, reps, seed, log_scale)| {
                    let sizes = format!("{lo}..{}:{step}", lo + span).parse().unwrap();
                    RunConfig::MseCurve(CurveConfig { family, theta, estimand, sizes, reps, seed, log_scale })
                }),
            (family, prop::collection::vec(-1e3f64..1e3, 0..5), "[a-z/._]{1,20}")
                .prop_map(|(family, at, input)| RunConfig::Estimate { family, input: input.into(), at }),
            ("[a-z]{1,8}", any::<u64>()).prop_map(|(section, seed)| RunConfig::Verify { section, seed }),
            ("[a-z/._]{1,20}", "[a-z_]{1,8}")
                .prop_map(|(input, column)| RunConfig::ExtractRecords { input: input.into(), column }),
        ]
    }

    proptest! {
        #[test]
        fn configs_round_trip_through_text(cfg in arb_config()) {
            let text = cfg.canonical();
            let back = RunConfig::parse(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.canonical(), text);
            prop_assert_eq!(back.digest(), cfg.digest());
        }
    }

    #[test]
    fn digest_tracks_content() {
        let base = CurveConfig {
            family: FamilySpec::new("power", None),
            theta: 1.0,
            estimand: Estimand::Theta,
            sizes: "3..30".parse().unwrap(),
            reps: 1000,
            seed: 1,
            log_scale: false,
        };
        let mut other = base.clone();
        other.theta = 1.0 + f64::EPSILON;
        let a = RunConfig::MseCurve(base);
        let b = RunConfig::MseCurve(other);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), RunConfig::parse(&a.canonical()).unwrap().digest());
    }
}
