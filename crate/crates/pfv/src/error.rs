//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at data row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("degenerate task: {0}")]
    DegenerateTask(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("AUROC undefined: labels contain a single class")]
    UndefinedAuroc,

    #[error("stratified split degenerate after {attempts} attempts: {message}")]
    SplitDegenerate { attempts: usize, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("perfect separation detected (|coefficient| exceeded {limit})")]
    Separation { limit: f64 },

    #[error("collinear covariates: information matrix is singular")]
    Collinearity,

    #[error("logistic fit did not converge in {max_iters} iterations")]
    NonConvergence { max_iters: usize },

    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),

    #[error("MI estimator error: {0}")]
    Estimator(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
