use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),

    #[error("field order {q} exceeds the supported bound {max}")]
    FieldTooLarge { q: u32, max: u32 },

    #[error("invalid modulus for GF({q}): {reason}")]
    InvalidModulus { q: u32, reason: String },

    #[error("element {value} is not valid in GF({q})")]
    InvalidElement { value: u32, q: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("generator matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no primitive polynomial of degree {n} over GF({q}) is available")]
    NoPrimitivePolynomial { q: u32, n: usize },

    #[error("size guard exceeded: {what} has {size} elements, limit is {limit}")]
    GuardExceeded { what: String, size: String, limit: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
