use thiserror::Error;

/// Unified error type for the crate.
///
/// Solver errors (`DegenerateSteadyState`, `SingularStep`) indicate a
/// mathematical obstruction; everything else is a usage or format problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    /// The constrained steady-state system lost rank: a pivot fell below
    /// `threshold` = 1e-13 * the infinity norm of the generator.
    #[error("degenerate steady state (pivot {pivot:.3e} <= threshold {threshold:.3e}){}", at.as_ref().map(|(p, v)| format!(" at {p} = {v}")).unwrap_or_default())]
    DegenerateSteadyState {
        pivot: f64,
        threshold: f64,
        /// Sweep context: offending (parameter name, grid value), if any.
        at: Option<(String, f64)>,
    },

    #[error("implicit step matrix (I - hL) is numerically singular")]
    SingularStep,

    #[error("grid too small: {len} points (need at least {min})")]
    GridTooSmall { len: usize, min: usize },

    #[error("grid does not cover delta = 0")]
    GridNotCoveringZero,

    #[error("unknown figure {0:?} (expected 2..8)")]
    UnknownFigure(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unknown key {key:?} at line {line}, column {col}")]
    UnknownKey { key: String, line: usize, col: usize },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("no columns selected")]
    EmptySelection,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
