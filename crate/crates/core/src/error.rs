use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown configuration key: {0}")]
    UnknownKey(String),
    #[error("malformed configuration: {0}")]
    Malformed(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("requested derivative order {requested} exceeds the available {available}")]
    OrderOverflow { requested: usize, available: usize },
    #[error("point outside the patch: {0}")]
    OutsidePatch(String),
    #[error("inversion did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(i64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
