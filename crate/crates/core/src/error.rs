use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("epsilon {0} is outside the supported range {1}")]
    EpsilonOutOfRange(f64, &'static str),

    #[error("invalid edge weight {0}: weights must be finite and positive")]
    InvalidWeight(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph has {n} vertices but the exact oracle is capped at {cap}")]
    OracleCap { n: usize, cap: usize },

    #[error("inconsistent stream spec: {0}")]
    Spec(String),

    #[error("vertex {vertex}: position {position} exceeded multiplicity {max}")]
    Distinctness {
        vertex: u32,
        position: i32,
        max: u8,
    },

    #[error("stream and trace disagree: {0}")]
    TraceMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
