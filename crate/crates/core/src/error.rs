use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not positive definite: {0}")]
    Definiteness(String),

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("certificate error: {0}")]
    Certificate(String),

    #[error("spectral gap error: {0}")]
    Gap(String),

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Inter-event time fell below the `dt_min` guard.
    #[error("Zeno behaviour suspected at t_k = {t_k}: inter-event time {dt:e} s")]
    ZenoSuspected { t_k: f64, dt: f64 },

    #[error("horizon insufficient: {0}")]
    HorizonInsufficient(String),
}
