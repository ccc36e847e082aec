//! Maximum-likelihood estimation for distributions with CDF
//! `F(x; θ) = exp(-B(θ) A(x))`, from i.i.d. samples and from lower record
//! values.
//!
//! - [`family`]: the member abstraction, built-in members and sampling.
//! - [`records`]: record extraction, direct record simulation, densities.
//! - [`estimators`]: θ̂ from samples or records and the plug-in PDF/CDF.
//! - [`analytic`]: bias and MSE series, exact moments and quadrature.
//! - [`montecarlo`]: simulation oracles and KS tests.

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod family;
pub mod montecarlo;
pub mod numerics;
pub mod records;

pub use error::{Error, Result};
pub use estimators::{EstimandTransform, EstimateKind, EstimateResult};
pub use family::{Family, FamilyRegistry, MemberHandle, MemberParams};
pub use records::RecordSequence;
