use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("operator `{kind}` cannot act on {subsystem} subsystem {index}")]
    IncompatibleOperator {
        kind: &'static str,
        subsystem: &'static str,
        index: usize,
    },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("initial state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("Hamiltonian is not Hermitian at t = {t} (deviation {deviation:e})")]
    NonHermitian { t: f64, deviation: f64 },

    #[error("time grid must be strictly increasing")]
    BadTimeGrid,

    #[error("no hopping between sites {0} and {1}")]
    MissingEdge(usize, usize),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: impl Into<f64>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
