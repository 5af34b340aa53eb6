use thiserror::Error;

/// Errors raised by mesh construction, assembly and the linear solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("triangle {index} is not counterclockwise (signed area {area:e})")]
    InvertedTriangle { index: usize, area: f64 },

    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("inconsistent orientation across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),

    #[error("Euler relation violated: V - E + T = {0}, expected 1")]
    EulerViolation(i64),

    #[error("point ({x}, {y}) lies outside triangle {triangle}")]
    PointOutsideTriangle { triangle: usize, x: f64, y: f64 },

    #[error("field length {found} does not match mesh size {expected}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("incompatible pure Neumann data: integral of f plus boundary flux = {0:e}")]
    IncompatibleNeumannData(f64),

    #[error("coefficient A is not positive definite at ({x}, {y})")]
    NotPositiveDefinite { x: f64, y: f64 },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("solver residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the linear algebra rather than of the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::SingularSystem(_) | Error::ResidualTooLarge { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
