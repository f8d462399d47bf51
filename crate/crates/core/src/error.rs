use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("radical tower: {0}")]
    Radical(String),
    #[error("unsupported rank {0} (expected 1..=4)")]
    Rank(usize),
    #[error("invalid root: {0}")]
    Root(String),
    #[error("modulus {0} is not a prime")]
    NotPrime(u64),
    #[error("invalid point: {0}")]
    Point(String),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("exhaustion violation: point ({}) lies in no stratum", .0.join(","))]
    Exhaustion(Vec<String>),
    #[error("disjointness violation: point ({}) lies in {ids:?}", point.join(","))]
    Disjointness { point: Vec<String>, ids: Vec<String> },
    #[error("budget exceeded: {needed} points requested, budget is {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("witness: {0}")]
    Witness(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}
