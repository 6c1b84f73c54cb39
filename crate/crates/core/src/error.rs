use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, parents, indices or words that do not fit together.
    #[error("structural error: {0}")]
    Structural(String),

    /// Numerical preconditions (Hermitian, PSD, centered, unit norm, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested quantity is not exact at the current truncation depth.
    #[error("degree {degree} is not exact at depth {depth}; rerun with --depth {required}")]
    Exactness {
        degree: usize,
        depth: usize,
        required: usize,
    },

    /// A free-product factor whose centered GNS space is zero (`A = C`).
    #[error("factor `{label}` has a one-dimensional GNS space; free product factors must satisfy A != C")]
    TrivialFactor { label: String },

    #[error("witness construction failed: {0}")]
    Witness(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
