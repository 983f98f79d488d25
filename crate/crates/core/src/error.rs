use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("box has lo > hi on axis {axis}")]
    InvalidBox { axis: usize },
    #[error("coordinate {0} is outside the supported range")]
    CoordRange(i64),
    #[error("empty set of kept dimensions")]
    EmptyDims,
    #[error("axis index {0} out of range")]
    BadAxis(usize),
    #[error("grid side {0} is not a power of two")]
    NotPowerOfTwo(i64),
    #[error("point {0:?} lies outside the grid")]
    OutOfGrid(Vec<i64>),
    #[error("point {0:?} is not covered by any candidate set")]
    Uncoverable(Vec<i64>),
    #[error("set {0} is not hit by any candidate point")]
    Unhittable(usize),
    #[error("weight {0} is below 1")]
    WeightBelowOne(f64),
    #[error("duplicate id {0}")]
    Duplicate(u64),
    #[error("unknown id {0}")]
    Unknown(u64),
    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<i64>),
    #[error("point {0:?} is not in the candidate set")]
    NotCandidate(Vec<i64>),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
