use thiserror::Error;

use crate::radio::UavId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate bearing: source and target coincide")]
    DegenerateBearing,

    #[error("degenerate two-ray geometry: both endpoints on the ground plane")]
    DegenerateGeometry,

    #[error("coincident transmitter and receiver positions")]
    CoincidentPoints,

    #[error("bandwidth must be positive, got {0} Hz")]
    InvalidBandwidth(f64),

    #[error("sinr must be non-negative, got {0}")]
    NegativeSinr(f64),

    #[error("unpaired UAV: roster has odd length {0}")]
    UnpairedUav(usize),

    #[error("insufficient channels: {needed} needed, {available} available")]
    InsufficientChannels { needed: usize, available: usize },

    #[error("duplicate UAV id {0}")]
    DuplicateUav(UavId),

    #[error("unknown UAV id {0}")]
    UnknownUav(UavId),

    #[error("{victim} and {interferer} are not co-channel pair partners")]
    NotPairPartners { victim: UavId, interferer: UavId },

    #[error("empty deployment")]
    EmptyDeployment,

    #[error("invalid TDD frame fractions: {0}")]
    InvalidTddFractions(String),

    #[error("target rate unreachable: needs {required_dbm:.2} dBm, limit is {limit_dbm} dBm")]
    UnreachableTarget { required_dbm: f64, limit_dbm: f64 },

    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("scenario parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
