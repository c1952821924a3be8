use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing value for variable {0}")]
    MissingVariable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("invalid variable name {0:?}")]
    InvalidName(String),
    #[error("parts live over different original spaces")]
    MismatchedSpaces,
    #[error("original space is not contained in the ambient space: {0}")]
    NotSubset(String),
    #[error("empty part: {0}")]
    EmptyPart(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("unknown row {0}")]
    UnknownRow(String),
    #[error("leaf value {0} is negative")]
    NegativeValue(String),
    #[error("not a clique: {0:?}")]
    InvalidClique(Vec<usize>),
    #[error("not a stable set: {0:?}")]
    InvalidStableSet(Vec<usize>),
    #[error("graph contains an induced copy of the forbidden pattern at {witness:?}")]
    ForbiddenPattern { witness: Vec<usize> },
    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("invalid rectangle partition: {0}")]
    InvalidPartition(String),
    #[error("leaf without formulation at {0}")]
    MissingLeafFormulation(String),
    #[error("internal node without children at {0}")]
    EmptySubtree(String),
    #[error("protocol stuck: {0}")]
    ProtocolStuck(String),
    #[error("{vars} variables exceed the elimination cap of {cap}")]
    VariableCapExceeded { vars: usize, cap: usize },
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
