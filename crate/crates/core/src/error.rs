use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation precondition (mode, order, or liveness rule).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("filter window holds {found} candidates, capacity is {capacity}")]
    TooManyCandidates { found: usize, capacity: usize },

    #[error("index {0} is not a candidate of the current filter window")]
    NotCandidate(usize),

    #[error("points {first} and {second} share a coordinate")]
    DuplicateCoordinate { first: usize, second: usize },

    #[error("point {0} has a coordinate outside the exact-predicate range")]
    CoordinateRange(usize),

    #[error("operation needs a source of known length")]
    UnknownLength,
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
