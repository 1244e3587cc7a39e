use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("field degree {0} outside supported range 4..=10")]
    UnsupportedDegree(u32),
    #[error("polynomial {poly:#x} is not primitive for degree {degree} (generator order {order})")]
    NotPrimitive { degree: u32, poly: u32, order: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("correction radius t = {0} is not supported (t must be 1 or 2)")]
    UnsupportedRadius(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("decoder mode {0} needs the transmitted blocks")]
    MissingTruth(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
