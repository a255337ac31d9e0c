use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} is too large for the matrix kernel (must be < 32768)")]
    EllTooLarge(u64),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("matrix is not invertible mod {0}")]
    SingularMatrix(u32),

    #[error("element list is not a subgroup: {0}")]
    ClosureViolation(String),

    #[error("action is not faithful: {0} acts trivially")]
    NotFaithful(String),

    #[error("action is not transitive: orbit of point 0 has {orbit} of {degree} points")]
    NotTransitive { orbit: usize, degree: usize },

    #[error("unsupported representation: {0}")]
    UnsupportedRep(String),

    #[error("singular curve: 4A^3 + 27B^2 = 0")]
    SingularCurve,

    #[error("bad reduction at p = {0}")]
    BadReduction(u64),

    #[error("unsupported prime {0}")]
    UnsupportedPrime(u64),

    #[error("zero has no factorization")]
    ZeroInput,

    #[error("the family construction requires A != 0")]
    ZeroA,

    #[error("empty range [{0}, {1}]")]
    EmptyRange(i64, i64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse {0:?}")]
    Parse(String),
}
