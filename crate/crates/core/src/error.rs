use thiserror::Error;

use crate::trade::FeedbackKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("protocol violation: mechanism declared {declared:?} feedback but requested {requested}")]
    ProtocolViolation {
        declared: FeedbackKind,
        requested: &'static str,
    },

    #[error("feedback kind {from:?} does not determine {to:?}")]
    NotDowngradable { from: FeedbackKind, to: FeedbackKind },

    #[error("mechanism already finished")]
    MechanismFinished,

    #[error("horizon {0} exceeded")]
    HorizonExceeded(u64),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
