use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("operand size mismatch: {0}")]
    SizeMismatch(String),
    #[error("term violates fermion parity of the requested sector: {0}")]
    ParityViolation(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("Kramers pairing failed: {0}")]
    Kramers(String),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("no dominant term: {0}")]
    NoDominantTerm(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
