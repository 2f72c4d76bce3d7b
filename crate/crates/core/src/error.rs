use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid Cartan data: {0}")]
    InvalidCartan(String),
    #[error("unknown type label `{0}`")]
    UnknownType(String),
    #[error("node {node} out of range 1..={rank}")]
    BadNode { node: usize, rank: usize },
    #[error("word {0} is not reduced")]
    NotReduced(String),
    #[error("recursion step needs l(ws_i) = l(w)+1: {0}")]
    Contract(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("series is not a unit: {0}")]
    NotUnit(String),
    #[error("leading term is ambiguous: {0}")]
    Ambiguous(String),
    #[error("component mismatch: {0}")]
    Component(String),
    #[error("difference equation has no finitely supported solution: {0}")]
    Solver(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("no catalog entry: {0}")]
    Catalog(String),
    #[error("closure bound exceeded: {0}")]
    Bound(String),
    #[error("Weyl group too large to enumerate ({0} elements so far)")]
    TooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
