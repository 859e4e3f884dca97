use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("query time {t} exceeds path horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("query point {x} outside the safe region |x| <= {limit} of the grid")]
    OutsideSafeRegion { x: f64, limit: f64 },

    #[error("grid refinement did not converge at t = {t}, x = {x}: coarse {coarse}, fine {fine}")]
    NonConvergentRefinement { t: f64, x: f64, coarse: f64, fine: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("tail remainder bound unavailable: {0}")]
    RemainderUnavailable(String),

    #[error("degenerate certificate grid: {0}")]
    DegenerateGrid(String),

    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
