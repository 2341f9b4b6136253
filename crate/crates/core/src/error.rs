use thiserror::Error;

use crate::jet::JetMode;
use crate::symbolic::{EvalError, ParseError, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("symbol `{symbol}` is not allowed in {mode} mode")]
    ModeMismatch { symbol: Symbol, mode: JetMode },
    #[error("invalid vector field: {0}")]
    InvalidField(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected a connection (dt coefficient 1)")]
    ExpectedConnection,
    #[error("expected a vertical field (dt coefficient 0)")]
    ExpectedVertical,
    #[error("one-form is not closed ({0})")]
    NotClosed(String),
    #[error("potential is singular at the base point: {0}")]
    SingularAtBase(String),
    #[error("degenerate Lagrangian: {0}")]
    Degenerate(String),
    #[error("unsupported expression class: {0}")]
    UnsupportedClass(String),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("Newton iteration did not converge (residual norm {residual:e})")]
    NewtonFailed { residual: f64 },
    #[error("integration blew up at t = {time}")]
    BlowUp { time: f64 },
    #[error("scenario line {line}: {message}")]
    Scenario { line: usize, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
