use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An observation or evaluation point lies outside the open support.
    #[error("x = {x} is outside the open support ({lo}, {hi}) of {member}")]
    Domain {
        member: String,
        x: f64,
        lo: f64,
        hi: f64,
    },

    #[error("theta = {theta} is outside the parameter domain ({lo}, {hi}) of {member}")]
    Parameter {
        member: String,
        theta: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// `n / T` left the range of `B`, or a numeric inverse failed to bracket.
    #[error("inversion failed: {0}")]
    Inversion(String),

    /// `E[T^-k]` of a Gamma(m, rate) variable does not exist for `k >= m`.
    #[error("negative moment of order {k} does not exist for gamma shape {m}")]
    MomentNonexistence { m: usize, k: usize },

    #[error("series has no finite terms: {0}")]
    SeriesUndefined(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("member `{member}` failed validation: {failed}")]
    Validation { member: String, failed: String },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("record times are synthetic and cannot be used here")]
    SyntheticTimes,

    #[error("{failures} of {reps} replications failed (limit is 1%): {first}")]
    RunFailed {
        failures: usize,
        reps: usize,
        first: String,
    },
}
