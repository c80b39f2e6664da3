//! Error type shared by every module of the toolkit.

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (negative `x` for the Liouville map, `xi = 0` in the transformed
    /// equation, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// A query point lies outside the range covered by stored data
    /// (tabulated potential grids, trajectory samples, solution grids).
    #[error("range error: {0}")]
    Range(String),

    /// The adaptive integrator collapsed its step below the underflow
    /// threshold `1e-12 * xi`.
    #[error("stiffness error at xi = {xi:.6e}: step {step:.3e} underflowed (last state {state:?})")]
    Stiffness { xi: f64, step: f64, state: Vec<f64> },

    /// Sampled data is too coarse for the requested operation.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// The phase of an oscillatory integral has a stationary point inside
    /// the integration range; the phase-resolved rules assume `h' != 0`.
    #[error("stationary phase point inside integration range near xi = {0:.6e}")]
    StationaryPhase(f64),

    /// The integral in question does not converge for the given data.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// A tail value whose truncation estimate exceeds half of its magnitude.
    #[error("unreliable tail: truncation estimate {truncation:.3e} exceeds half of |value| = {magnitude:.3e}")]
    UnreliableTail { truncation: f64, magnitude: f64 },

    /// Invalid parameters (tolerances out of range, malformed grids, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Failure while parsing a potential description or a grid expression.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal consistency gate of the integration pipeline failed.
    #[error("integration failure: {0}")]
    Integration(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
