use thiserror::Error;

use crate::quadrature::QuadResult;

/// Errors raised by field construction, quadrature and the verification suites.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}; expected 2 or 3")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("{what} did not converge within {subdivisions} subdivisions (value {}, error estimate {})", .partial.value, .partial.error_estimate)]
    NonConvergence {
        what: &'static str,
        subdivisions: usize,
        partial: QuadResult,
    },

    #[error("integrand is not integrable at infinity: decay exponent {exponent} does not exceed {required}")]
    NonIntegrable { exponent: f64, required: f64 },

    #[error("missing decay information: {0}")]
    MissingDecay(&'static str),

    #[error("extrapolation diverged: {0}")]
    ExtrapolationDiverged(String),

    #[error("point {0:?} coincides with a singularity")]
    Singular(Vec<f64>),

    #[error("negative base {base} raised to non-integer power {exponent}")]
    NegativeBase { base: f64, exponent: f64 },

    #[error("decay hint violated at |x| = {radius}: |f| = {value}, bound = {bound}")]
    DecayViolated { radius: f64, value: f64, bound: f64 },

    #[error("bracket failure: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
