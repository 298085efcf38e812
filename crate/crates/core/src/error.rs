use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// Each variant carries a stable short code (see [`Error::code`]) used by the
/// CLI and in JSON diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("eigenvalue {value:e} lies outside the function domain [0, inf)")]
    Domain { value: f64 },

    #[error("dimension {n} outside the supported range 1..=64")]
    DimensionOutOfRange { n: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { n: usize, row: usize, len: usize },

    #[error("matrix is not Hermitian (asymmetry {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("malformed JSON: {0}")]
    MalformedJson(String),

    #[error("invalid multiplicities {mults:?} for dimension {n}")]
    InvalidMultiplicities { mults: Vec<usize>, n: usize },

    #[error("index k = {k} out of range 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("Schatten order p = {0} must be >= 1")]
    InvalidNormOrder(f64),

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("function does not satisfy checker requirements: {0}")]
    ClassificationMismatch(String),

    #[error("function is not strictly increasing and cannot be inverted")]
    NotStrictlyIncreasing,

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("unknown registry case '{0}'")]
    UnknownCase(String),

    #[error("unknown checker '{0}'")]
    UnknownChecker(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "E_NONCONVERGENCE",
            Error::Domain { .. } => "E_DOMAIN",
            Error::DimensionOutOfRange { .. } => "E_DIM_RANGE",
            Error::DimensionMismatch { .. } => "E_DIM_MISMATCH",
            Error::NotSquare { .. } => "E_NOT_SQUARE",
            Error::NotHermitian { .. } => "E_NOT_HERMITIAN",
            Error::MalformedJson(_) => "E_MALFORMED_JSON",
            Error::InvalidMultiplicities { .. } => "E_MULTIPLICITIES",
            Error::IndexOutOfRange { .. } => "E_INDEX",
            Error::InvalidNormOrder(_) => "E_NORM_ORDER",
            Error::LengthMismatch(..) => "E_LENGTH",
            Error::ClassificationMismatch(_) => "E_CLASSIFICATION",
            Error::NotStrictlyIncreasing => "E_NOT_INVERTIBLE",
            Error::InvalidFunction(_) => "E_FUNCTION",
            Error::NotPsd { .. } => "E_NOT_PSD",
            Error::PreconditionUnmet(_) => "E_PRECONDITION",
            Error::UnknownCase(_) => "E_UNKNOWN_CASE",
            Error::UnknownChecker(_) => "E_UNKNOWN_CHECKER",
            Error::InvalidConfig(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
