use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate quadratic space: {0}")]
    Degenerate(String),
    #[error("not an isometry: {0}")]
    NotIsometry(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("object mismatch: {0}")]
    ObjectMismatch(String),
    #[error("image leaves the subfunctor: {0}")]
    SubfunctorDefect(String),
    #[error("not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no isometric extension found: {0}")]
    WittFailure(String),
    #[error("unknown functor `{name}`; expected one of: {grammar}")]
    UnknownFunctor { name: String, grammar: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
