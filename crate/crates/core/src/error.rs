use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("invalid group spec {spec}: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error("group {spec} failed verification: relation `{relation}` does not hold")]
    Relation { spec: String, relation: String },
    #[error("{operation} is not defined for group {spec}")]
    Unsupported { operation: &'static str, spec: String },
    #[error("element index {index} out of range for a group of order {order}")]
    OutOfRange { index: usize, order: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("sequences belong to different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },
    #[error("sequence {sub} is not contained in {sup}")]
    NotContained { sub: String, sup: String },
    #[error("exponent must be non-negative, got {0}")]
    NegativePower(i64),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("reachable products of the empty sequence are undefined")]
    EmptySequence,
    #[error("sequence of length {len} exceeds the brute-force oracle limit of {limit}")]
    OracleTooLong { len: usize, limit: usize },
    #[error("sequence has {distinct} distinct elements, above the limit of {limit}")]
    TooManyDistinct { distinct: usize, limit: usize },
    #[error("sub-multiset state space {estimate} exceeds the limit of {limit}")]
    StateSpaceTooLarge { estimate: u128, limit: u128 },
    #[error("target set must be nonempty")]
    EmptyTargets,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("node budget of {budget} exhausted: maximum free length unknown above {lower_bound}")]
    BudgetExhausted { budget: u64, lower_bound: usize },
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
