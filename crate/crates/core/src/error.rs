use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("torsion profile {0:?} is not realized by any finite abelian p-group")]
    InvalidProfile(Vec<u32>),

    #[error("subgroup is not contained in the given group")]
    NotContained,

    #[error("enumeration budget of {budget} candidate bases exceeded ({what})")]
    BudgetExceeded { budget: u64, what: String },

    #[error("non-exact division {numerator} / {denominator} in {what}")]
    NonExactDivision {
        numerator: String,
        denominator: String,
        what: String,
    },

    #[error("graded system in degree {degree} is singular")]
    SingularSystem { degree: u32 },

    #[error("non-integer coefficient {value} in degree {degree}")]
    NonIntegerSolution { degree: u32, value: String },

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error signals a broken identity or exactness check,
    /// as opposed to bad input or resource limits.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::NonExactDivision { .. }
                | Error::SingularSystem { .. }
                | Error::NonIntegerSolution { .. }
                | Error::Verification(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
