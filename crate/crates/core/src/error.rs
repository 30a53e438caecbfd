use std::path::PathBuf;

use crate::circuit::SlotId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // simulator
    #[error("feature vector has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("feature vector norm {norm} is not within 1e-6 of 1")]
    NotNormalized { norm: f64 },
    #[error("wire {wire} is out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },
    #[error("CNOT control and target are both wire {0}")]
    ControlEqualsTarget(usize),
    #[error("qubit count {0} is outside the supported range 1..={max}", max = crate::sim::MAX_QUBITS)]
    UnsupportedQubitCount(usize),
    #[error("no angle supplied for slot {0}")]
    MissingSlot(SlotId),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("invalid backend configuration: {0}")]
    Backend(String),

    // chromosome / circuit
    #[error("invalid gene bounds: {0}")]
    InvalidBounds(String),
    #[error("invalid chromosome {genes:?}: {reason}")]
    InvalidChromosome { genes: [u32; 5], reason: String },
    #[error("{points} crossover points requested but only {available} internal boundaries exist")]
    TooManyPoints { points: usize, available: usize },
    #[error("width gene {width} exceeds the qubit count {n_qubits}")]
    WidthExceedsQubits { width: u32, n_qubits: usize },

    // pool / model
    #[error("cannot reintegrate an empty result list")]
    EmptyResults,
    #[error("parameter shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("label {label} is out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid training configuration: {0}")]
    InvalidTrainConfig(String),

    // GA
    #[error("population is empty")]
    EmptyPopulation,
    #[error("need at least 2 parents, got {0}")]
    TooFewParents(usize),
    #[error("requested top {k} but only {available} distinct records exist")]
    KTooLarge { k: usize, available: usize },
    #[error("invalid GA configuration: {0}")]
    InvalidGaConfig(String),
    #[error("parameter pool changed during inference (digest {before} -> {after})")]
    PoolMutationDetected { before: String, after: String },

    // data
    #[error("{path}: bad IDX magic {found:#010x}, expected {expected:#010x}")]
    BadMagic { path: PathBuf, expected: u32, found: u32 },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("{path}: file ends before the declared payload")]
    TruncatedFile { path: PathBuf },
    #[error("class {0} is not a valid digit class")]
    UnknownClass(u8),
    #[error("PCA needs more samples ({samples}) than output dimensions ({dim})")]
    TooFewSamples { samples: usize, dim: usize },
    #[error("invalid PCA request: {0}")]
    InvalidPca(String),
    #[error("eigendecomposition did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("{classes} classes do not fit into {dim} basis states")]
    TooManyClasses { classes: usize, dim: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
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
}
