use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {0} is outside [0,1]")]
    ValueOutOfRange(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),
    #[error("carrier mismatch: expected {expected}, found {found}")]
    CarrierMismatch { expected: String, found: String },
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("incomplete table: no entry for {0:?}")]
    MissingEntry(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not a pullback square: {0}")]
    InvalidSquare(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("not a partial equivalence relation: {0}")]
    NotPer(String),
    #[error("not an equivalence relation: {0}")]
    NotEquivRel(String),
    #[error("not a functional relation: {0} sequent fails")]
    NotFunctional(&'static str),
    #[error("not a strict predicate: {0} sequent fails")]
    NotStrict(&'static str),
    #[error("morphism is not mono")]
    NotMono,
    #[error("metric axiom violated: {0}")]
    Metric(String),
    #[error("map is not uniformly continuous")]
    NotUniformlyContinuous,
    #[error("no zero of the relation over {0:?}")]
    NoZero(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("invalid witness pair: {0}")]
    InvalidWitness(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
