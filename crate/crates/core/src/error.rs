use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not skew-symmetric: |A[{i}][{j}] + A[{j}][{i}]| = {dev:e}")]
    NotSkew { i: usize, j: usize, dev: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid step size h = {0}")]
    BadStep(f64),
    #[error("non-finite function value at {0}")]
    NonFinite(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coincident points at index {0} and {1}")]
    Coincident(usize, usize),
    #[error("odd number of insertions ({0})")]
    OddCount(usize),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("truncation overflow: level {level} exceeds cap {cap}")]
    Truncation { level: String, cap: String },
    #[error("state outside the Virasoro descendant span of psi: {0}")]
    OutsideSpan(String),
    #[error("point swallowed or driving collision at t = {0}")]
    Swallowed(f64),
    #[error("chart derivative vanishes at {0}")]
    DegenerateChart(String),
}
