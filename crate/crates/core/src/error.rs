use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no observations")]
    EmptyData,
    #[error("no cluster centers")]
    NoCenters,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("need at least {needed} knots, got {got}")]
    TooFewKnots { needed: usize, got: usize },
    #[error("knots must be strictly increasing (index {0})")]
    KnotsNotIncreasing(usize),
    #[error("partition has length {got}, expected {expected}")]
    PartitionLength { expected: usize, got: usize },
    #[error("partition entry {index} = {label} is outside 0..{k}")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        k: usize,
    },
    #[error("expected {expected} centers, got {got}")]
    CenterCount { expected: usize, got: usize },
    #[error("Simpson quadrature needs an odd node count >= 3, got {0}")]
    SimpsonNodes(usize),
    #[error("sample size must be odd, got {0}")]
    EvenSampleSize(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
