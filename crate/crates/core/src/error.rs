use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operands use different variable sets")]
    VariableMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("index {index} out of range 1..={bound}")]
    Index { index: usize, bound: usize },
    #[error("Jacobi identity fails at (i,j,k)=({i},{j},{k}), component {l}: residual {residual}")]
    JacobiViolation {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        residual: String,
    },
    #[error("ad of generator {generator} has non-rational spectrum (minimal polynomial {minimal_polynomial})")]
    NonRationalSpectrum {
        generator: usize,
        minimal_polynomial: String,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("missing assignment for {0}")]
    MissingAssignment(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("expression is not exactly representable: {0}")]
    NotExact(String),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input field '{field}': {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
