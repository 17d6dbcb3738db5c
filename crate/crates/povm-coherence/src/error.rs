//! Crate-wide error type.
//!
//! Every variant carries a stable machine-readable code (see [`Error::code`])
//! so front ends can map failures without parsing prose.

use thiserror::Error;

/// Errors raised by validation, numerics, optimization and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian: max |M - M^dag| entry {deviation:e} exceeds {bound:e}")]
    NotHermitian { deviation: f64, bound: f64 },

    #[error("not positive semidefinite: eigenvalue {min_eigenvalue:e} below -{clamp:e}")]
    NotPsd { min_eigenvalue: f64, clamp: f64 },

    #[error("trace is {trace}, expected 1 within {bound:e}")]
    TraceNotOne { trace: f64, bound: f64 },

    #[error("probabilities sum to {sum}, expected 1 within {bound:e}")]
    NotNormalized { sum: f64, bound: f64 },

    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("effects do not sum to identity: max deviation {deviation:e} exceeds {bound:e}")]
    IncompletePovm { deviation: f64, bound: f64 },

    #[error("projector {index} violates {check}: deviation {deviation:e} exceeds {bound:e}")]
    NotProjective {
        index: usize,
        check: &'static str,
        deviation: f64,
        bound: f64,
    },

    #[error("operator is not unitary: max |U^dag U - I| entry {deviation:e} exceeds {bound:e}")]
    NotUnitary { deviation: f64, bound: f64 },

    #[error("Kraus operators do not preserve trace: max |sum K^dag K - I| entry {deviation:e}")]
    NotTracePreserving { deviation: f64 },

    #[error("{field} = {value} outside [{lo}, {hi}{}]", if *.inclusive_hi { "" } else { ")" })]
    OutOfRange {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
        inclusive_hi: bool,
    },

    #[error("outcome unreachable: probability {probability:e} at or below threshold")]
    OutcomeUnreachable { probability: f64 },

    #[error("invalid optimizer configuration: {reason}")]
    BadConfig { reason: String },

    #[error("objective returned a non-finite value at the state stored in this error")]
    NonFiniteObjective {
        state: Box<crate::numerics::ComplexMatrix>,
    },

    #[error("fixture check failed: {what} (value {value:e}, bound {bound:e})")]
    Fixture {
        what: String,
        value: f64,
        bound: f64,
    },

    #[error("problem file parse error: {0}")]
    Parse(String),

    #[error("problem file is invalid: {0}")]
    Invalid(String),

    #[error("internal numerical inconsistency: {what} (value {value:e})")]
    Internal { what: &'static str, value: f64 },
}

impl Error {
    /// Stable machine-readable code for each error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "E_NOT_SQUARE",
            Error::DimensionMismatch { .. } => "E_DIM_MISMATCH",
            Error::NotHermitian { .. } => "E_NOT_HERMITIAN",
            Error::NotPsd { .. } => "E_NOT_PSD",
            Error::TraceNotOne { .. } => "E_TRACE",
            Error::NotNormalized { .. } => "E_NOT_NORMALIZED",
            Error::NegativeProbability { .. } => "E_NEGATIVE_PROB",
            Error::IncompletePovm { .. } => "E_POVM_INCOMPLETE",
            Error::NotProjective { .. } => "E_NOT_PROJECTIVE",
            Error::NotUnitary { .. } => "E_NOT_UNITARY",
            Error::NotTracePreserving { .. } => "E_NOT_TRACE_PRESERVING",
            Error::OutOfRange { .. } => "E_OUT_OF_RANGE",
            Error::OutcomeUnreachable { .. } => "E_OUTCOME_UNREACHABLE",
            Error::BadConfig { .. } => "E_BAD_CONFIG",
            Error::NonFiniteObjective { .. } => "E_NON_FINITE_OBJECTIVE",
            Error::Fixture { .. } => "E_FIXTURE",
            Error::Parse(_) => "E_PARSE",
            Error::Invalid(_) => "E_INVALID",
            Error::Internal { .. } => "E_INTERNAL",
        }
    }

    /// True for errors that indicate a malformed input file rather than a
    /// semantically invalid problem.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }

    /// True for internal-consistency failures (optimizer dominance broken,
    /// coherence negative beyond the clamp window, objective non-finite).
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::Internal { .. } | Error::NonFiniteObjective { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
