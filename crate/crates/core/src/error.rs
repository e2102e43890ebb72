use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometric grading cannot reach R_max = {r_max} with growth {growth}; suggested growth >= {suggested:.6}")]
    MeshGrowth { r_max: f64, growth: f64, suggested: f64 },

    #[error("geometry failure: {0}")]
    Geometry(String),

    #[error("mountain-pass path collapsed (maximum at endpoint {0}); geometry must be re-probed")]
    PathCollapse(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-positive value {value:e} at rho = {rho}")]
    NonPositive { rho: f64, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
