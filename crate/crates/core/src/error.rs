use thiserror::Error;

/// Errors surfaced by the library. Exit-code mapping lives in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("interning budget of {limit} states exceeded")]
    BudgetExceeded { limit: usize },

    #[error("step measure requires rank >= 2, got {0}")]
    RankTooSmall(u32),

    #[error("operation requires the rank-2 step measure, got rank {0}")]
    UnsupportedRank(u32),

    #[error("K_n parameter must satisfy n >= 1, got {0}")]
    InvalidKnParameter(u32),

    #[error("conjugate index {index} out of range for n = {n}")]
    ConjugateOutOfRange { index: u32, n: u32 },

    #[error("operation not supported on this space kind: {0}")]
    WrongSpaceKind(&'static str),

    #[error("cell probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),

    #[error("no loop at the vertex reached by the given word")]
    NoLoopAtVertex,

    #[error("bigon detected at vertex {vertex}: letters {letters} share a target")]
    BigonDetected { vertex: String, letters: String },

    #[error("degenerate ratio: {0}")]
    DegenerateRatio(String),

    #[error("cannot parse word {0:?}: letters must be one of a, A, b, B (or the literal \"e\")")]
    BadWord(String),

    #[error("sample {index} failed: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
