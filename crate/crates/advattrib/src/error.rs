use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("document contains no in-alphabet characters")]
    EmptyDocument,

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("feature mask has no active bits")]
    EmptyMask,

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("selection failed: {0}")]
    Selection(String),

    #[error("probe budget exceeded: {0}")]
    Budget(String),

    #[error("mask bank build failed at mask {index}: {message}")]
    Bank { index: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
