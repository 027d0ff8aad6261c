//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotlabError {
    /// A parameter fell outside the domain of the operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An average was requested over a ball that contains no grid nodes.
    #[error("empty ball")]
    EmptyBall,

    /// A discrete cone or ball family had no usable members at this resolution.
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    /// An experiment was requested outside the parameter regime it is valid in.
    #[error("regime violation: {0}")]
    RegimeViolation(String),

    /// De/serialization failure for one of the JSON interchange formats.
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, PotlabError>;
