use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("axiom violated: {0}")]
    Axiom(String),
    #[error("outside the certified window: {0}")]
    Window(String),
    #[error("internal certificate failed: {0}")]
    Internal(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Prefix the message with the object it concerns, keeping the kind.
    pub fn context(self, what: &str) -> Error {
        match self {
            Error::Input(m) => Error::Input(format!("{what}: {m}")),
            Error::DimensionMismatch(m) => Error::DimensionMismatch(format!("{what}: {m}")),
            Error::Axiom(m) => Error::Axiom(format!("{what}: {m}")),
            Error::Window(m) => Error::Window(format!("{what}: {m}")),
            Error::Internal(m) => Error::Internal(format!("{what}: {m}")),
            Error::Json(e) => Error::Input(format!("{what}: {e}")),
            e @ Error::Io(_) => e,
        }
    }
}
