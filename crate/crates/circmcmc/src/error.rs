//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is internally inconsistent (group counts, method
    /// options, malformed designs).
    #[error("configuration error: {0}")]
    Config(String),

    /// A mean direction was requested for a sample with zero resultant
    /// length; the direction of a zero vector is undefined.
    #[error("mean direction is undefined (zero resultant length)")]
    UndefinedDirection,

    /// A truncated draw was requested on an empty interval. This is a bug
    /// in the caller, not a data problem.
    #[error("degenerate interval: lower {lower} >= upper {upper}")]
    DegenerateInterval { lower: f64, upper: f64 },

    /// The latent-variable Gibbs sampler mixes too slowly to be usable for
    /// concentrated data; other methods must be used instead.
    #[error(
        "gibbs sampling is unusable for concentration kappa = {kappa} \
         (autocorrelation explodes above roughly 7); use mh or rejection"
    )]
    GibbsInfeasible { kappa: f64 },

    /// The rejection envelope could not be constructed. Carries the target
    /// parameters for diagnosis.
    #[error("rejection envelope construction failed (eta = {eta}, beta_t = {beta_t})")]
    Envelope { eta: f64, beta_t: f64 },

    /// A data file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
