use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The requested quantity depends on coefficients below the tracked precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A continued fraction ran out of precision after producing `terms` partial quotients.
    #[error("precision exhausted after {terms} partial quotients")]
    PrecisionExhaustedAfter { terms: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("coefficient {value} at byte {pos} is out of range for the field")]
    CoefficientOutOfRange { value: String, pos: usize },

    #[error("operands live over different fields")]
    FieldMismatch,

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("search budget exceeded: {needed} candidates requested, budget {budget}")]
    SearchBudgetExceeded { needed: u128, budget: u128 },

    #[error("no witness found within the guaranteed bound")]
    WitnessNotFound,

    #[error("search incomplete: degree bound {required} required")]
    SearchIncomplete { required: usize },

    #[error("transcript too short: {required_moves} moves required")]
    InsufficientDepth { required_moves: usize },

    #[error("counterexample found: q = {q:?}")]
    CounterexampleFound { q: Vec<String> },

    #[error("branch index {index} out of range for base {base}")]
    BranchOutOfRange { index: u64, base: u64 },
}
