use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the operation's domain (bad index, unnormalized state,
    /// malformed move, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands whose dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A strategy that does not conform to the game's move sets.
    #[error("invalid strategy at turn {turn}: {msg}")]
    Strategy { turn: usize, msg: String },

    /// Enumeration would exceed the configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
