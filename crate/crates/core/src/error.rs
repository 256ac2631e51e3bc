//! Error type shared by all modules of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantity that must be strictly positive was not.
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    /// A quantity that must be finite was NaN or infinite.
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// Fewer than two users in a scenario or alpha vector.
    #[error("need at least 2 users, got {got}")]
    TooFewUsers { got: usize },

    /// An alpha vector of the wrong length was passed to a fixed-size closed form.
    #[error("expected {expected} alpha entries, got {got}")]
    AlphaCount { expected: usize, got: usize },

    /// User index outside `0..K`.
    #[error("user index {index} out of range for K = {k}")]
    IndexOutOfRange { index: usize, k: usize },

    /// Paired gain vectors of different lengths.
    #[error("gain vectors differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Two parameters of a closed-form identity are too close; the formula
    /// would cancel catastrophically. Callers fall back to quadrature.
    #[error("parameters {a} and {b} are within relative gap {threshold:e}; closed-form identity is near-degenerate")]
    NearDegenerate { a: f64, b: f64, threshold: f64 },

    /// Closed forms exist only for K = 2 and K = 3.
    #[error("closed-form selection probabilities cover K = 2 and K = 3 only, got K = {k}")]
    UnsupportedK { k: usize },

    /// Adaptive quadrature hit its subdivision cap before reaching tolerance.
    /// Carries the best estimate and its error bound.
    #[error("quadrature did not converge after {subdivisions} subdivisions: estimate {estimate}, error bound {error_bound:e}")]
    ConvergenceFailure {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// A simulation was requested with zero trials.
    #[error("trial count must be at least 1")]
    ZeroTrials,

    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
