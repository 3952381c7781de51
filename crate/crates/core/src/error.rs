use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("vertex {vertex} has zero weighted degree")]
    IsolatedVertex { vertex: usize },
    #[error("directed graph is not strongly connected")]
    NotStronglyConnected,
    #[error("vertex {vertex} has no outgoing weight")]
    SinkVertex { vertex: usize },
    #[error("transition matrix is not irreducible")]
    NotIrreducible,
    #[error("stationary solve failed: residual {residual:e}")]
    NumericalFailure { residual: f64 },
    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("laziness parameter {0} outside (0, 1]")]
    DeltaOutOfRange(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("chain is not reversible")]
    NotReversible,
    #[error("second eigenvector has empty positive support")]
    DegenerateEigenvector,
    #[error("vector is identically zero")]
    ZeroVector,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {vertex} out of range for {n} states")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("set has stationary mass {mass} > 1/2")]
    MassTooLarge { mass: f64 },
    #[error("exact enumeration over {n} states exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("exponent p = {p} outside the admissible range")]
    ExponentOutOfRange { p: f64 },
    #[error("logarithm argument out of domain (phi = {phi})")]
    LogDomain { phi: f64 },
    #[error("size {n} is below the minimum {min}")]
    TooSmall { n: usize, min: usize },
    #[error("first row does not define a symmetric circulant")]
    NonSymmetricCirculant,
    #[error("invalid partition blocks: {0}")]
    InvalidBlocks(String),
    #[error("partition blocks contain no mergeable zero block")]
    NoZeroBlock,
    #[error("sets overlap")]
    OverlappingSets,
    #[error("hypercube dimension {d} exceeds {max}")]
    DimensionTooLarge { d: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("inconsistent header: {0}")]
    InconsistentHeader(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
