use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has {0} symbols; at most 64 are supported")]
    AlphabetTooLarge(usize),
    #[error("invalid symbol name `{0}`")]
    InvalidSymbol(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("distribution has an empty part")]
    EmptyPart,
    #[error("parts do not cover the alphabet; missing {0}")]
    NotCovering(String),
    #[error("parts {0} and {1} are comparable under inclusion")]
    ComparableParts(String, String),
    #[error("part {0} appears twice")]
    DuplicatePart(String),
    #[error("operands are over different alphabets")]
    AlphabetMismatch,

    #[error("merging yields the trivial distribution")]
    TrivialResult,
    #[error("improper partition: {0}")]
    ImproperPartition(String),
    #[error("distribution has {size} parts; merge enumeration is capped at {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("candidate reductions have different sources")]
    SourceMismatch,
    #[error("{0} is not a merge of the source distribution")]
    NotAMerge(String),
    #[error("candidate reduction is empty")]
    EmptyCandidate,
    #[error("malformed candidate: {0}")]
    MalformedCandidate(String),

    #[error("language exceeds the capacity of {limit} words")]
    CapacityExceeded { limit: usize },
    #[error("distribution is not substitutable into part {0}")]
    NotSubstitutable(usize),
    #[error("proof trace does not replay: {0}")]
    BadTrace(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
