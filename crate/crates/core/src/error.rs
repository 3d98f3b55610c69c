use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is not a power of two; the circuit path needs a qubit embedding")]
    NotPowerOfTwo(usize),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("gate targets must be distinct, got {0:?}")]
    DuplicateTargets(Vec<usize>),

    #[error("{kind} expects {expected} target(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not unitary: max |U†U - I| = {0:e}")]
    NotUnitary(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("qubit budget exceeded: circuit needs {required} qubits, budget is {budget}")]
    QubitBudget { required: usize, budget: usize },

    #[error("degenerate phase-space line: (a, b) = (0, 0)")]
    DegenerateLine,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
