use thiserror::Error;

/// Errors surfaced by the simulation and analysis stages.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A series cannot be rescaled because every sample has the same value.
    #[error("degenerate series: all {len} samples equal {value}")]
    DegenerateSeries { value: f64, len: usize },

    /// The Fock-space truncation retains too little of the initial state.
    #[error("fock truncation insufficient: retained weight {retained:.17} < required {required:.17}")]
    TruncationInsufficient { retained: f64, required: f64 },

    /// A measure that is only defined on a connected graph was requested on a
    /// disconnected one.
    #[error("graph is disconnected: reached {reached} of {nodes} nodes")]
    Disconnected { reached: usize, nodes: usize },

    /// A persisted artifact could not be parsed back.
    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
