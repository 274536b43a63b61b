use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NonHermitianInput(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation is defined on pure states only")]
    DensityInput,
    #[error("vector is not unit length (norm = {0})")]
    NonUnitVector(f64),
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("matrix is not an involution (max |A^2 - I| = {0:e})")]
    NotInvolution(f64),
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
    #[error("value {value} out of range {min}..={max}")]
    OutOfRange { value: usize, min: usize, max: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("missing observable: {0}")]
    MissingObservable(&'static str),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("search space of 2^{bits} strategies exceeds the 2^{limit} guard")]
    SearchSpaceTooLarge { bits: u32, limit: u32 },
    #[error("total dimension {dim} exceeds the guard {limit}")]
    DimensionGuard { dim: usize, limit: usize },
    #[error("negative entry {0} in a nonnegative matrix")]
    NegativeEntry(f64),
    #[error("normalization of term {term} vanishes (omega = {omega:e})")]
    ZeroNorm { term: usize, omega: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
