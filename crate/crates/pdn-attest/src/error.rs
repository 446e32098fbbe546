//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or constructor argument violated its contract.
    /// The message names the offending parameter.
    #[error("invalid parameter `{param}`: {reason}")]
    InvalidParameter { param: String, reason: String },

    /// A node name was not found in the network.
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    /// A region tag does not exist in the target network.
    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    /// The admittance system could not be solved at a frequency
    /// (disconnected or degenerate network, or condition number above
    /// the singularity cap).
    #[error("singular admittance system at {frequency_hz} Hz (condition estimate {condition:.3e})")]
    SingularSystem { frequency_hz: f64, condition: f64 },

    /// Both sample vectors of a frequency cell have zero variance, so
    /// Welch's t is undefined. The caller decides how to treat the cell.
    #[error("degenerate frequency cell: both sample variances are zero")]
    DegenerateCell,

    /// Golden summary and test trace set cover different (frequency, sensor) grids.
    #[error("trace grid mismatch: {0}")]
    GridMismatch(String),

    /// A signature was presented for verification a second time.
    #[error("signature replay rejected: {device_id} nonce {nonce:#018x} was already used")]
    SignatureReplay { device_id: String, nonce: u64 },

    /// Enrollment would overwrite an existing (device, nonce) signature.
    #[error("duplicate signature: {device_id} nonce {nonce:#018x} already enrolled")]
    DuplicateSignature { device_id: String, nonce: u64 },

    /// A named scenario preset does not exist.
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(param: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            param: param.to_string(),
            reason: reason.into(),
        }
    }
}
