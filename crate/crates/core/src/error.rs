use thiserror::Error;

/// Errors produced by construction and computation routines.
///
/// Structural *verifier* failures (a hypothesis that does not hold on an
/// instance) are not errors; verifiers return reports. `Error` is reserved
/// for malformed inputs: shape mismatches, non-nested subspaces, maps that
/// do not commute with differentials, and the like.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("subspace is not contained in the claimed enclosing space ({context})")]
    NotContained { context: String },

    #[error("differential does not square to zero at degree {degree}")]
    DifferentialSquare { degree: i64 },

    #[error("chain map does not commute with differentials at degree {degree}")]
    NotChainMap { degree: i64 },

    #[error("filtration step {p} is not d-stable at degree {degree}")]
    NotDStable { p: i64, degree: i64 },

    #[error("filtration is not decreasing at step {p}, degree {degree}")]
    NotDecreasing { p: i64, degree: i64 },

    #[error("map does not preserve the filtration at step {p}, degree {degree}")]
    FiltrationNotPreserved { p: i64, degree: i64 },

    #[error("cell set is not {expected} (witness cell `{cell}`)")]
    BadCellSet { expected: &'static str, cell: String },

    #[error("invalid face poset: {0}")]
    BadPoset(String),

    #[error("sheaf restrictions are not functorial: {0}")]
    NotFunctorial(String),

    #[error("invalid flag: {0}")]
    BadFlag(String),

    #[error("invalid sheaf complex: {0}")]
    BadSheafComplex(String),

    #[error("t-exactness witness failure at truncation level {level}: {detail}")]
    TExactness { level: i64, detail: String },

    #[error("unit of adjunction is not a valid comparison map: {0}")]
    BadUnit(String),

    #[error("instance generation exhausted after {tries} attempts")]
    GenerationExhausted { tries: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
