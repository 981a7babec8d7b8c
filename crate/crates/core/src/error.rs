use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field parameters must be positive (h = {h}, n = {n})")]
    InvalidDegree { h: u32, n: u32 },
    #[error("field of order {order} exceeds the table limit of {limit} elements")]
    TableLimit { order: u128, limit: u64 },
    #[error("modulus has degree {got}, expected {expected}")]
    ModulusDegree { expected: u32, got: usize },
    #[error("modulus is not monic or has coefficients outside F_{p}")]
    MalformedModulus { p: u32 },
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("modulus is irreducible but its root is not a primitive element")]
    NonPrimitiveModulus,
    #[error("no primitive polynomial of degree {degree} over F_{p} was found")]
    NoPrimitivePolynomial { p: u32, degree: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("zero element is not allowed here")]
    ZeroElement,
    #[error("degree {inner} does not divide {outer}")]
    DegreeNotDividing { inner: u32, outer: u32 },
    #[error("element is not in the subfield of degree {degree}")]
    NotInSubfield { degree: u32 },
    #[error("subspaces have different ground fields (degrees {left} and {right})")]
    GroundFieldMismatch { left: u32, right: u32 },
    #[error("operation is undefined for the zero subspace")]
    ZeroSubspace,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-integral value: {0}")]
    NonIntegral(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("work budget exceeded: {needed} units needed, budget is {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("verification mismatch: {0}")]
    Mismatch(String),
}
