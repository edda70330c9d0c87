use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be positive")]
    NonPositiveDim,

    #[error("bracket index ({i},{j},{k}) out of range for dimension {dim}")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        k: usize,
        dim: usize,
    },

    #[error("bracket pair ({i},{j}) must satisfy i < j")]
    NotUpperPair { i: usize, j: usize },

    #[error("duplicate bracket entry ({i},{j},{k})")]
    DuplicateEntry { i: usize, j: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("lower central series stalls at dimensions {dims:?}")]
    NotNilpotent { dims: Vec<usize> },

    #[error("Jacobi identity fails (defect {defect:e})")]
    NotALieAlgebra { defect: f64 },

    #[error("algebra is not unimodular (max |tr ad| = {trace:e})")]
    NotUnimodular { trace: f64 },

    #[error(
        "soliton residual ({eq6:e}) and derivation defect ({defect:e}) disagree; this is a bug"
    )]
    OracleDisagreement { eq6: f64, defect: f64 },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("invalid gauge parameter `{0}`")]
    InvalidGauge(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
}
