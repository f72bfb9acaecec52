use thiserror::Error;

/// Errors produced by graph construction, spectral, diffusion and entropy routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid step set: {0}")]
    InvalidStep(String),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({0}, {1}) already present")]
    EdgeExists(usize, usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("node {0} is isolated; diffusion generators require every node to have an edge")]
    IsolatedNode(usize),

    #[error("graph with {n} nodes exceeds the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("spectral gap is zero; the process does not mix")]
    NoMixing,

    #[error("support violation at index {0}: p > 0 where q = 0")]
    SupportViolation(usize),

    #[error("mean degree {0} is not supercritical (must exceed 1)")]
    Subcritical(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
