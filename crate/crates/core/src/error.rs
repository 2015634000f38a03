use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition {0:?}: parts must be nonnegative and weakly decreasing")]
    InvalidPartition(Vec<i64>),

    #[error("invalid signature {0:?}: parts must be weakly decreasing")]
    InvalidSignature(Vec<i64>),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid plane partition: {0}")]
    InvalidPlanePartition(String),

    #[error("interlacing violated between slices {left} and {right}")]
    InterlacingViolation { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent pairing: {0}")]
    Divergent(String),

    #[error("tail tolerance {tol:e} not reachable within {cap} terms")]
    TailUnreachable { tol: f64, cap: usize },

    #[error("coincident parameters a_i = a_j = {0}")]
    CoincidentParameters(f64),

    #[error("a = {a} lies outside the analyticity annulus ({r1}, {r2})")]
    AnnulusViolation { a: f64, r1: f64, r2: f64 },

    #[error("empty support: {0}")]
    EmptySupport(String),

    #[error("specialization is not single-parameter: {0}")]
    NotSingleParameter(String),

    #[error("gamma parameters are not supported by the samplers")]
    GammaUnsupported,

    #[error("state-count cap {0} exceeded during enumeration")]
    EnumerationCap(usize),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invariant breached: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
