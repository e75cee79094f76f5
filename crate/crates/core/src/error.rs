use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::sim::MAX_QUBITS)]
    QubitCount(usize),
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("gate {0} addresses the same qubit twice")]
    DuplicateQubit(&'static str),
    #[error("gate {0} requires an angle")]
    MissingAngle(&'static str),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("circuit width mismatch: {front} vs {back} qubits")]
    WidthMismatch { front: usize, back: usize },
    #[error("parameter `{0}` declared twice")]
    ParameterCollision(String),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("non-finite value for `{0}`")]
    NonFinite(String),
    #[error("dense unitary limited to {max} qubits, circuit has {got}")]
    UnitaryTooLarge { got: usize, max: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("label {0} is not binary")]
    NonBinaryLabel(f64),
    #[error("optimizer: {0}")]
    Optimizer(String),
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("data: {0}")]
    Data(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Broad category used by front ends to pick an exit status.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Usage,
            Error::Parse { .. }
            | Error::MissingColumn { .. }
            | Error::Data(_)
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::NonBinaryLabel(_) => ErrorKind::Data,
            _ => ErrorKind::Run,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Run,
}
