use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular (pivot or singular value {0:e})")]
    SingularMatrix(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("argument {0} outside the domain")]
    DomainError(f64),
    #[error("Chebyshev coefficient {k} has imaginary part {im:e}")]
    NonRealCoefficient { k: usize, im: f64 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("qubit or register index out of range: {0}")]
    IndexError(String),
    #[error("post-selection probability {0:e} too small")]
    ZeroProbability(f64),
    #[error("largest singular value {0} exceeds 1")]
    NormTooLarge(f64),
    #[error("arcsin argument {0} out of range")]
    AngleDomain(f64),
    #[error("block readback deviates by {0:e}")]
    BlockMismatch(f64),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("qubit cap exceeded: need {need}, cap {cap}")]
    CapExceeded { need: usize, cap: usize },
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),
    #[error("zero matrix")]
    ZeroMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::CapExceeded { .. } | Error::BudgetExceeded(_) => 4,
            _ => 3,
        }
    }
}
