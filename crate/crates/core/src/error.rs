use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("mode index {index} out of range 1..={n_modes}")]
    ModeOutOfRange { index: usize, n_modes: usize },

    #[error("mode indices must be distinct: {0:?}")]
    RepeatedIndex(Vec<usize>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{0} overflowed")]
    Overflow(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step size underflow at t = {t} (h = {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("integration diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),

    #[error("symplectic residual {residual:e} exceeds {limit:e} at t = {t}")]
    SymplecticBreakdown { residual: f64, limit: f64, t: f64 },

    #[error("unphysical state at t = {t}: minimal symplectic eigenvalue {min_eigenvalue}")]
    Unphysical { t: f64, min_eigenvalue: f64 },

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("validation failed for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("failed at time step {step} (t = {t})")]
    AtTimeStep {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerics (integrator, symplectic or physicality
    /// guards) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::StepUnderflow { .. }
            | Error::Divergence { .. }
            | Error::StepLimit(_)
            | Error::SymplecticBreakdown { .. }
            | Error::Unphysical { .. }
            | Error::Overflow(_) => true,
            Error::AtTimeStep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
