use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown input symbol `{0}`")]
    UnknownInput(String),

    #[error("input alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("malformed machine: {0}")]
    Malformed(String),

    #[error("DOT parse error at line {line}: {msg}")]
    Dot { line: usize, msg: String },

    #[error("DOT input has no start marker (`__start0 -> <state>`)")]
    MissingStart,

    #[error("nondeterministic transition: state `{state}` has two edges for input `{input}`")]
    Nondeterministic { state: String, input: String },

    #[error("partial machine: state `{state}` has no transition for input `{input}`")]
    Partial { state: String, input: String },

    #[error("machine is not minimal ({actual} states, minimal has {minimal})")]
    NotMinimal { actual: usize, minimal: usize },

    #[error("machines are not pairwise IO-equivalent (counterexample on word {0:?})")]
    NotBisimilar(Vec<String>),

    #[error("invalid delay model: {0}")]
    InvalidDelay(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("action budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("system under learning answered inconsistently on word {word:?}")]
    InconsistentSul { word: Vec<String> },

    #[error("not a counterexample for the current hypothesis: {0:?}")]
    NotACounterexample(Vec<String>),

    #[error(
        "structural assumption violated: on word {word:?} position {position} the SUL answered `{actual}` but the expanded machine predicts `{expected}`"
    )]
    StructuralViolation {
        word: Vec<String>,
        position: usize,
        expected: String,
        actual: String,
    },

    #[error("coverage graph is not Eulerian: {0}")]
    NotEulerian(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("external SUL protocol error: {0}")]
    Protocol(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
