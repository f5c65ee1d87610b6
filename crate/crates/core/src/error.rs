use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("peripheral factor index {index} out of range (group has {count})")]
    FactorOutOfRange { index: usize, count: usize },

    #[error("free generator index {index} out of range (group has {count})")]
    FreeGeneratorOutOfRange { index: usize, count: usize },

    #[error("vector of length {got} supplied for peripheral factor {factor} of rank {expected}")]
    VectorLength {
        factor: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("element is not an element of this group: {0}")]
    MismatchedSpec(String),

    #[error("{what} cap exceeded: requested {requested}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("missing constant: {0}")]
    MissingConstant(String),

    #[error("rank condition violated: {0}")]
    RankCondition(String),

    #[error("letter {element} does not belong to factor {factor}")]
    NotInFactor { factor: usize, element: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    /// True for the enumeration-cap family, which the CLI maps to its own exit code.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}
