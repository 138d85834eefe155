use thiserror::Error;

/// Errors raised by the synthesis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the configured maximum {max}")]
    SizeLimit { dim: usize, max: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Taylor accuracy guard violated: |A|_F = {norm:.4} > 1; increase steps_per_segment")]
    TaylorGuard { norm: f64 },

    #[error("time {t} outside path domain [0, {end}]")]
    TimeRange { t: f64, end: f64 },

    #[error(
        "parameter count condition violated: 2*{n}*{nu} = {have} < {need} generators of SU(2^{n})"
    )]
    Dof {
        n: usize,
        nu: usize,
        have: usize,
        need: usize,
    },

    #[error("table line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid control path: {0}")]
    Path(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
