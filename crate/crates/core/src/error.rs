use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("invalid dimensions: {0}")]
    Dim(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("Siegel gamma of rank {rank} has a pole at alpha = {alpha}")]
    Pole { rank: usize, alpha: f64 },

    #[error("rank {rank} exceeds the supported maximum {max}")]
    RankTooLarge { rank: usize, max: usize },

    #[error("matrix does not have full column rank")]
    RankDeficient,

    #[error("block I - a'a is numerically singular (smallest eigenvalue {min_eig:e})")]
    DegenerateBlock { min_eig: f64 },

    #[error("evaluation point is not inside the unit matrix interval")]
    PointOutsideQ,

    #[error("finite-difference step {h:e} is below the cancellation guard 1e-5")]
    StepTooSmall { h: f64 },

    #[error("projection profile stayed degenerate after {tries} resamples")]
    DegenerateProjection { tries: usize },

    #[error("configuration violates a precondition: {0}")]
    ConstraintViolation(String),

    #[error("frame columns are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
