use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix dimension must be positive")]
    DimensionZero,

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("ensemble {kind} does not support dimension {dim}")]
    UnsupportedDim { kind: &'static str, dim: usize },

    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormExceeded { norm: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("solver stalled at mu = {mu:e}; certified interval [{lower}, {upper}]")]
    SolverStall { mu: f64, lower: f64, upper: f64 },

    #[error("dual witness failed feasibility verification: {0}")]
    InfeasibleWitness(String),

    #[error("decomposition is not primal feasible (min eigenvalue {min_eigenvalue:e})")]
    PrimalInfeasible { min_eigenvalue: f64 },

    #[error("witness is not dual feasible: {0}")]
    DualInfeasible(String),

    #[error("decomposition has no {0} part")]
    MissingPart(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
