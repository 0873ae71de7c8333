use thiserror::Error;

#[derive(Debug, Error)]
pub enum QesError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("system is not square: {equations} equations for {unknowns} unknowns ({hint})")]
    NonSquare {
        equations: usize,
        unknowns: usize,
        hint: String,
    },

    #[error("potential is not finite at r = {r}")]
    NonFinite { r: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QesError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QesError::Domain(msg.into()))
}
