use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A quantity that must be inverted (or divided by) is zero.
    #[error("singular quantity: {0}")]
    Singular(String),

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    /// Cholesky failed even after the largest jitter was applied.
    #[error("cholesky factorization failed at pivot {pivot} (jitter {jitter:.1e})")]
    Factorization { pivot: usize, jitter: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
