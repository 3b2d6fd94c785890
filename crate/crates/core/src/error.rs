use thiserror::Error;

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("tangent vectors live at different base points")]
    BaseMismatch,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("vector field is not tangent to the sphere")]
    NotTangent,
    #[error("degenerate input: gram determinant {gram:e} below threshold")]
    Degenerate { gram: f64 },
    #[error("sampling exhausted: accepted {accepted} of {attempts} draws")]
    SamplingExhausted { accepted: usize, attempts: usize },
    #[error("point too close to the critical set (|grad| = {norm:e})")]
    Regularity { norm: f64 },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("orthogonal complement not integrable: shape operator asymmetry {asym:e}")]
    Integrability { asym: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
