use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid signature: {0}")]
    Signature(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("arity mismatch for `{symbol}`: expected {expected}, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("variable `{0}` is not assigned")]
    FreeVariable(String),

    #[error("formula is not closed; free variables: {0}")]
    NotClosed(String),

    #[error("formula is not monodic: `{0}` has more than one free variable")]
    NotMonodic(String),

    #[error("formula is not monadic: `{0}` has arity {1}")]
    NotMonadic(String, usize),

    #[error("temporal operator in first-order input: {0}")]
    TemporalInFirstOrder(String),

    #[error("ill-formed temporal problem: {0}")]
    IllFormedProblem(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid run: {0}")]
    InvalidRun(String),

    #[error("translation error: {0}")]
    Translation(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("undecided: {0}")]
    Undecided(String),
}

pub type Result<T> = std::result::Result<T, Error>;
