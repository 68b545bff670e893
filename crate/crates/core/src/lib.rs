//! Generalized Pólya urns for fringe statistics of random m-ary search
//! trees: exact rational limit laws for protected nodes, leaves and
//! one-protected nodes, with tree and urn simulators to check them.

pub mod models;
pub mod ratlinalg;
pub mod simulate;
pub mod urn;
pub mod verify;

pub use ratlinalg::{LinalgError, Rational};

/// Errors surfaced by the library. Each maps to a CLI exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid urn specification: {0}")]
    Spec(String),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("size cap exceeded: {0}")]
    Size(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("method not applicable: {0}")]
    NotApplicable(String),
    #[error("regime is {regime}: {detail}")]
    Regime { regime: String, detail: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// 2 for specification or input problems, 3 for size caps, 4 for failed
    /// verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Size(_) => 3,
            Error::Verification(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
