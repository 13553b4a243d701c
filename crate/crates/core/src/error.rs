use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Every variant is a domain error: the inputs were well-formed enough to
/// parse but violate a precondition of the requested computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count {n} outside supported range 1..={max}")]
    VariableCount { n: usize, max: usize },
    #[error("variable index {index} out of range 1..={n}")]
    VariableIndex { index: usize, n: usize },
    #[error("variable {0} assigned twice")]
    DuplicateVariable(usize),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("function is constant")]
    ConstantFunction,
    #[error("function never takes the value {0}")]
    ValueNotAttained(u8),
    #[error("function is not monotone")]
    NotMonotone,
    #[error("complex undefined: function is identically 1")]
    EmptyComplex,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("formula is not read-once")]
    NotReadOnce,
    #[error("unsupported gate: {0}")]
    UnsupportedGate(&'static str),
    #[error("formula does not have the alternating complete and/or shape")]
    NotAlternating,
    #[error("parameter {name}={value} out of range ({range})")]
    OutOfRange {
        name: &'static str,
        value: i64,
        range: &'static str,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("strategy queried variable {0} twice")]
    RepeatedQuery(usize),
    #[error("strategy stopped before the value was determined after {0} queries")]
    PrematureStop(usize),
    #[error("oracle returned {winner} for match ({i}, {j})")]
    BadOracle { i: usize, j: usize, winner: usize },
    #[error("distribution is not normalized (sum = {0})")]
    NotNormalized(String),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("degenerate costs: {0}")]
    Degenerate(&'static str),
    #[error("column generation did not converge in {iterations} iterations (last gap {gap})")]
    NoConvergence { iterations: usize, gap: String },
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("graph error: {0}")]
    Graph(String),
    #[error("property is trivial (constant on all graphs)")]
    TrivialProperty,
    #[error("predicate is not invariant under vertex relabeling")]
    NotAGraphProperty,
    #[error("no prime in the open interval ({lo}/2, {hi}/3)")]
    NoPrimeInRange { lo: usize, hi: usize },
    #[error("unknown property: {0}")]
    UnknownProperty(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
