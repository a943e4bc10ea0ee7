use crate::machine::MeterReport;
use crate::strings::BinStr;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("malformed encoding of {what}: {value:?}")]
    MalformedEncoding { what: &'static str, value: BinStr },

    #[error("malformed name: {0}")]
    MalformedName(String),

    #[error("malformed padding at query {query:?}: {value:?}")]
    MalformedPadding { query: BinStr, value: BinStr },

    #[error("value {value} does not fit into {target}")]
    Overflow { value: String, target: &'static str },

    #[error("scan depth {depth} exceeds the cutoff {cutoff}")]
    CutoffExceeded { depth: usize, cutoff: usize },

    #[error("answer of length {len} at query {query:?} exceeds the declared bound {bound}")]
    BoundViolation { query: BinStr, len: usize, bound: usize },

    #[error("trace has no entry for query {0:?}")]
    TraceMiss(BinStr),

    #[error("missing queries: {}", .0.iter().map(|q| format!("{q:?}")).collect::<Vec<_>>().join(", "))]
    MissingQueries(Vec<BinStr>),

    #[error("value at query {0:?} is not a pair")]
    NotAPair(BinStr),

    #[error("budget exhausted after {} of {} steps", .0.steps_used, .0.budget)]
    BudgetExhausted(Box<MeterReport>),

    #[error("parameter violation: {0}")]
    ParameterViolation(String),

    #[error("point cloud of {size} points exceeds the exact-mode limit {limit}")]
    SizeExceeded { size: usize, limit: usize },

    #[error("sequence tabulated to {have} entries, {need} required")]
    InsufficientTabulation { have: usize, need: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}
