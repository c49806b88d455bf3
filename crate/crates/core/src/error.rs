use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a pseudo-element: {0} lies inside its own exclusion set")]
    NotPseudoElement(String),

    #[error("action `{action}` is not enabled in state {state}")]
    ActionDisabled { action: String, state: String },

    #[error("partitions are defined over different carriers")]
    CarrierMismatch,

    #[error("broken partition: {0}")]
    BrokenPartition(String),

    #[error("strategy is not proper: {0}")]
    NonProper(String),

    #[error("unsolvable: {0}")]
    Unsolvable(String),

    #[error("the state space is empty after pruning blocking states")]
    EmptyStateSpace,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("monotonicity violated: {0}")]
    Monotonicity(String),

    #[error("state space has {size} states, above the enumeration cap of {cap}")]
    EnumerationCap { size: u128, cap: u128 },

    #[error("no fixpoint after {0} iterations")]
    IterationCap(usize),

    #[error("timed out")]
    Timeout,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
