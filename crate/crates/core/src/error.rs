use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown group identifier `{0}` (expected Z<m>, S3, S4 or D<m>)")]
    UnknownGroup(String),
    #[error("malformed group parameter in `{spec}`: {reason}")]
    MalformedParameter { spec: String, reason: String },
    #[error("group table check failed: {0}")]
    InvalidGroup(String),
    #[error("invalid representation {name}: {reason}")]
    InvalidRepresentation { name: String, reason: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("rounding residue {residue:.3e} exceeds threshold for {what}")]
    ResidueTooLarge { what: String, residue: f64 },
    #[error("irrep index {index} out of range for {group} ({count} irreps)")]
    IrrepOutOfRange {
        group: String,
        index: usize,
        count: usize,
    },
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionOverCap { dim: u128, cap: u128 },
    #[error("power iteration did not converge after {iterations} iterations (best {best})")]
    NotConverged { best: f64, iterations: usize },
    #[error("representation pair is not admissible: {0}")]
    NotAdmissible(String),
    #[error("enumeration over {count} irrep tuples exceeds cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
