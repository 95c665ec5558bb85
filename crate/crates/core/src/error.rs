use thiserror::Error;

#[derive(Debug, Error)]
pub enum PinnError {
    /// A caller broke an operation's precondition (shape mismatch, empty
    /// point set, index out of range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite energy at iteration {iteration}: {context}")]
    NonFiniteEnergy { iteration: usize, context: String },

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { line: usize, key: String, message: String },

    #[error("checkpoint parse error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = PinnError> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> PinnError {
    PinnError::Contract(msg.into())
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::contract(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
