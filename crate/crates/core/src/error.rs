use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table of {q}^{n} entries exceeds the exact-computation cap of {cap}")]
    TableTooLarge { q: usize, n: usize, cap: usize },
    #[error("table length {found} does not match q^n = {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("measure has {found} atoms but the function alphabet has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("measure has a zero atom at symbol {symbol}")]
    ZeroAtom { symbol: usize },
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("expected a {expected} codomain")]
    CodomainMismatch { expected: &'static str },
    #[error("coordinate {coordinate} out of range for arity {n}")]
    CoordinateOutOfRange { coordinate: usize, n: usize },
    #[error("symbol {symbol} out of range for alphabet size {q}")]
    SymbolOutOfRange { symbol: usize, q: usize },
    #[error("no exact evaluator for this function at this size; use Monte Carlo")]
    NoExactEvaluator,
    #[error("function values are not in {{0, 1}}")]
    NotBinary,
    #[error("function is not 0-monotone along the path anchor {anchor}")]
    NotZeroMonotone { anchor: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("function is constant; the report is degenerate")]
    ConstantFunction,
    #[error("function has nonzero mean {mean}")]
    NonZeroMean { mean: f64 },
    #[error("threshold curve never crosses level {level}")]
    NoCrossing { level: f64 },
    #[error("no strict leader: symbol {symbol} does not strictly exceed all other atoms")]
    NoStrictLeader { symbol: usize },
    #[error("empty subset of alternatives")]
    EmptySubset,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid choice function: {0}")]
    InvalidChoiceFunction(String),
    #[error("a realizing profile needs {needed} voters, over the budget of {budget}")]
    BudgetExhausted { needed: u64, budget: u64 },
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
