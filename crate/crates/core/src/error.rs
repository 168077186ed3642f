use std::fmt;

/// Errors raised while parsing bracketed trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnbalancedBrackets,
    EmptyNode,
    MissingLabel,
    InvalidLabel(String),
    UnexpectedToken(String),
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => write!(f, "empty input"),
            ParseErrorKind::UnbalancedBrackets => write!(f, "unbalanced brackets"),
            ParseErrorKind::EmptyNode => write!(f, "empty node"),
            ParseErrorKind::MissingLabel => write!(f, "missing label"),
            ParseErrorKind::InvalidLabel(l) => write!(f, "invalid label `{l}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::TrailingInput => write!(f, "trailing input after tree"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(ParseErrorKind),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("non-finite input")]
    NonFiniteInput,
    #[error("SVD did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("non-finite function evaluation")]
    NonFiniteEvaluation,
    #[error("label id {id} out of range for vocabulary of {len}")]
    IdOutOfRange { id: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("backward cache does not match gradient shape: {0}")]
    CacheMismatch(String),
    #[error("count list has length {got}, expected {expected}")]
    CountMismatch { expected: usize, got: usize },
    #[error("zero phoneme count for word {0}")]
    ZeroCount(usize),
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("non-finite loss at epoch {epoch}, step {step}")]
    NonFiniteLoss { epoch: usize, step: usize },
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl From<ParseErrorKind> for Error {
    fn from(kind: ParseErrorKind) -> Self {
        Error::Parse(kind)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
