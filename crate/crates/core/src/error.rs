use thiserror::Error;

/// Errors raised by the invariant pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(String, String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("degenerate pencil: {0}")]
    DegeneratePencil(String),
    #[error("pencil is not smooth: {0}")]
    NotSmooth(String),
    #[error("unsupported splitting: {0}")]
    UnsupportedSplitting(String),
    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("fiber mismatch: {0}")]
    FiberMismatch(String),
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("invalid root: {0}")]
    InvalidRoot(String),
    #[error("invalid lattice automorphism: {0}")]
    InvalidAut(String),
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
