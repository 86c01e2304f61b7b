use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("level {level} out of range 1..={depth}")]
    LevelRange { level: usize, depth: usize },
    #[error("vertex {vertex} out of range at level {level}")]
    VertexRange { level: usize, vertex: usize },
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },
    #[error("cannot resolve successor at depth {0}")]
    Unresolved(usize),
    #[error("enumeration refused: {required} paths exceed cap {cap}")]
    Cap { required: String, cap: usize },
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("depth {needed} needed, {available} available")]
    Depth { needed: usize, available: usize },
    #[error("enclosure too wide: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
