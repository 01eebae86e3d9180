use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one of the
/// failure classes the CLI turns into an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry count {found} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },
    #[error("invalid wire set: {0}")]
    InvalidWires(String),
    #[error("invalid Cayley table: {0}")]
    InvalidCayleyTable(String),
    #[error("unknown gate: {0}")]
    UnknownGate(String),
    #[error("invalid rotation axis: {0}")]
    InvalidAxis(String),
    #[error("operator is not unitary (deviation {deviation:.3e} >= tolerance {tol:.3e})")]
    NonUnitary { deviation: f64, tol: f64 },
    #[error(
        "gate is not a fusion operator (pentagon residual {residual:.6e} >= tolerance {tol:.3e})"
    )]
    NotFusion { residual: f64, tol: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty or malformed parameter grid: {0}")]
    EmptyGrid(String),
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("register of {qubits} qubits exceeds the simulation cap of {max}")]
    RegisterTooLarge { qubits: usize, max: usize },
    #[error("register mismatch: {left} vs {right} qubits")]
    RegisterMismatch { left: usize, right: usize },
    #[error("rewrite verification failed{}: phase distance {phase_distance:.3e} >= tolerance {tol:.3e}", site.map(|s| format!(" at site {s}")).unwrap_or_default())]
    VerificationFailed {
        site: Option<usize>,
        phase_distance: f64,
        tol: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
