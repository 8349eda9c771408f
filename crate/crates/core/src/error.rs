use thiserror::Error;

/// Errors raised by learners, estimators and problem oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("undefined empirical risk: dataset is empty")]
    EmptyDataset,
    #[error("no hindsight oracle: problem `{0}` has neither an exact minimizer nor a searchable hypothesis space")]
    NoHindsightOracle(String),
    #[error("invalid data point at round {round}: {detail}")]
    InvalidDataPoint { round: usize, detail: String },
    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),
    #[error("unsupported objective: {0}")]
    UnsupportedObjective(String),
    #[error("no gradient: problem `{0}` is not (sub)differentiable in the hypothesis")]
    NoGradient(String),
    #[error("empty expert set")]
    EmptyExpertSet,
    #[error("degenerate expert set: need at least 2 experts, got {0}")]
    DegenerateExpertSet(usize),
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: String, detail: String },
    #[error("unknown problem `{name}`; catalog: {catalog}")]
    UnknownProblem { name: String, catalog: String },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("unreachable state: {0}")]
    UnreachableState(String),
    #[error("dyadic underflow: round {round} exceeds the floating-point cap of {cap} rounds")]
    DyadicUnderflow { round: usize, cap: usize },
    #[error("cover too large: {size} members exceeds the expert cap {cap}")]
    CoverTooLarge { size: usize, cap: usize },
    #[error("incompatible play: {0}")]
    IncompatiblePlay(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_param(name: &str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        detail: detail.into(),
    }
}
