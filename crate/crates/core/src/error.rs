use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported gate `{name}` at line {line}")]
    UnsupportedGate { name: String, line: usize },

    #[error("only one quantum and one classical register are supported (line {line}: {message})")]
    MultipleRegisters { line: usize, message: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit device")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("missing calibration for {0}")]
    MissingCalibration(String),

    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),

    #[error("coupling graph is disconnected: qubit {0} is unreachable from qubit 0")]
    Disconnected(usize),

    #[error("qubit set {0:?} does not induce a connected subgraph")]
    DisconnectedSubgraph(Vec<usize>),

    #[error("({0}, {1}) is not an edge of the coupling graph")]
    NotAnEdge(usize, usize),

    #[error("invalid crosstalk entry: {0}")]
    InvalidCrosstalk(String),

    #[error("matrix shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),

    #[error("no feasible partition with {needed} qubits for circuit `{circuit}`")]
    NoFeasiblePartition { circuit: String, needed: usize },

    #[error(
        "circuit `{circuit}` has {k} qubits; exhaustive partitioning is capped at {cap} qubits, use --method qhsp"
    )]
    GspTooLarge {
        circuit: String,
        k: usize,
        cap: usize,
    },

    #[error("circuit `{circuit}` needs {needed} qubits but the device has {available}")]
    CircuitTooLarge {
        circuit: String,
        needed: usize,
        available: usize,
    },

    #[error("circuits must be ordered by density (descending): `{0}` is out of order")]
    UnsortedCircuits(String),

    #[error("duplicate circuit id `{0}`")]
    DuplicateCircuitId(String),

    #[error("qubit {qubit} of circuit `{circuit}` is used after being measured")]
    NonTerminalMeasure { circuit: String, qubit: usize },

    #[error("routing made no progress after {0} iterations")]
    RoutingStalled(usize),

    #[error("too many qubits to simulate: {qubits} > {cap}")]
    TooManyQubits { qubits: usize, cap: usize },

    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error("empty counts")]
    EmptyCounts,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach the offending file to an error raised while reading it.
    pub fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 for bad input, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RoutingStalled(_) => 2,
            Error::File { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
