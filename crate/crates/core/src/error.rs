use thiserror::Error;

/// Errors raised by the numerical toolkit.
///
/// `Pole` is kept separate from the other domain errors because callers (the
/// CLI in particular) map it to its own exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter validation failed: ad - bc - 1 = {residual:e}")]
    Determinant { residual: f64 },

    #[error("inconsistent separated boundary data: h+ = {h_plus}, h- = {h_minus} (need h+ = -h-)")]
    InconsistentSeparated { h_plus: String, h_minus: String },

    #[error("pole in {context}: |denominator| = {denominator:e}")]
    Pole { context: String, denominator: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("problem size too large: {0}")]
    Size(String),

    #[error("point lies on a coincidence hyperplane: {0}")]
    Hyperplane(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_pole(&self) -> bool {
        matches!(self, Error::Pole { .. })
    }

    /// Attach extra context to a pole error; other variants pass through.
    pub fn in_context(self, what: impl AsRef<str>) -> Self {
        match self {
            Error::Pole {
                context,
                denominator,
            } => Error::Pole {
                context: format!("{} ({context})", what.as_ref()),
                denominator,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
