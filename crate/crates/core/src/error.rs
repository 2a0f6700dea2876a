use thiserror::Error;

/// Errors raised by state, loop, model and bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QgError {
    #[error("vector norm {0:e} is too small to normalize")]
    ZeroVector(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (|norm - 1| = {0:e})")]
    NotNormalized(f64),

    #[error("non-finite amplitude")]
    NonFinite,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("band {band} is degenerate with a neighbour (gap {gap:e} <= {tol:e})")]
    DegenerateAtTolerance { band: usize, gap: f64, tol: f64 },

    #[error("eigensolver did not converge (off-diagonal norm {0:e})")]
    EigenNotConverged(f64),

    #[error("finite-difference derivative is not finite")]
    NonFiniteDerivative,

    #[error("loop needs at least 3 states, got {0}")]
    TooFewStates(usize),

    #[error("segment {index} joins nearly orthogonal states (|overlap| = {overlap:e})")]
    IllConditionedSegment { index: usize, overlap: f64 },

    #[error("wrong Hilbert-space dimension: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("no usable reference pole for the solid-angle sum")]
    PoleDegenerate,

    #[error("bad resolution: {0}")]
    BadResolution(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate loop specification: {0}")]
    DegenerateSpec(String),

    #[error("area {area} exceeds the sphere area {max}")]
    AreaExceedsSphere { area: f64, max: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("quantum metric is singular at the Dirac point")]
    SingularAtDiracPoint,

    #[error("norm drift {0:e} exceeds the integrator limit")]
    NormDrift(f64),

    #[error("trajectory is not cyclic (end-point distance {0:e})")]
    NotCyclic(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QgError>;

impl From<std::io::Error> for QgError {
    fn from(e: std::io::Error) -> Self {
        QgError::Io(e.to_string())
    }
}

impl From<csv::Error> for QgError {
    fn from(e: csv::Error) -> Self {
        QgError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for QgError {
    fn from(e: serde_json::Error) -> Self {
        QgError::Parse(e.to_string())
    }
}
