use thiserror::Error;

/// Errors raised by the engine's constructors and operations.
///
/// Verification *outcomes* (an axiom failing, an inverse that cannot be
/// found) are not errors; they are recorded in a [`Report`](crate::Report).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid coefficient {0:?}: expected an exact fraction such as \"3\" or \"-2/5\"")]
    Coefficient(String),

    #[error("not in standard position: {0}")]
    NotStandardPosition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Christoffel table is not bilinear: {0}")]
    NotBilinear(String),

    #[error("no certified decomposition: {0}")]
    MissingDecomposition(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dim_check(context: &str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: context.to_string(),
            expected,
            found,
        })
    }
}
