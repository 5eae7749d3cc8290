use thiserror::Error;

use crate::rational::ArithmeticError;
use crate::space::MetricError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricError),
    #[error("compact sets must be nonempty")]
    EmptySet,
    #[error("point index {index} out of range for a space of {size} points")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error(
        "space has {points} points, above the hyperspace cap of {cap}; \
         exhaustive deciders are unavailable (use the targeted `tent` check or raise HYPERSPACE_NODE_CAP)"
    )]
    HyperspaceTooLarge { points: usize, cap: usize },
    #[error("set {0} is not in Ran(F)")]
    NotInRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed pseudo-orbit: {0}")]
    InvalidPseudoOrbit(String),
    #[error("system file error: {0}")]
    SystemFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
