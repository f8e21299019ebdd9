use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(i64),

    #[error("{value} has no inverse modulo {modulus}")]
    NoInverse { value: i64, modulus: i64 },

    #[error("{0} is not prime")]
    NotPrime(i64),

    #[error("an odd prime is required, got 2")]
    EvenPrime,

    #[error("value {0} is outside the supported 63-bit range")]
    OutOfRange(i128),

    #[error("arithmetic overflow while {0}")]
    Overflow(&'static str),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("{0} is not a strong solution")]
    NotStrong(String),

    #[error("{0} does not satisfy the system")]
    NotASolution(String),

    #[error("conic parametrization identity failed (arithmetic bug)")]
    IdentityCheckFailed,

    #[error("derivative vanishes modulo p at the starting point")]
    DerivativeVanishes,

    #[error("starting point is not a root modulo p")]
    NotARoot,

    #[error("no root modulo {0} exists")]
    RootSearchFailed(i64),

    #[error("p-adic parameters do not match: (p={0}, K={1}) vs (p={2}, K={3})")]
    ParameterMismatch(i64, usize, i64, usize),

    #[error("{what} exceeds budget {limit}")]
    BudgetExceeded { what: String, limit: i128 },

    #[error("no primitive image: p^2 divides d")]
    NoPrimitiveImage,

    #[error("input tuple is trivial")]
    TrivialInput,
}
