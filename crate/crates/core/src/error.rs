use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed problem document: {0}")]
    Malformed(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("entry ({i}, {j}) is outside a {rows}x{cols} cost matrix")]
    IndexOutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    #[error("entry ({i}, {j}) appears more than once")]
    DuplicateEntry { i: usize, j: usize },

    #[error("stored cost at ({i}, {j}) is not finite: {value}")]
    NonFiniteCost { i: usize, j: usize, value: f64 },

    #[error("subset enumeration limit exceeded: {rows} rows and {cols} columns (limit {per_side} per side, {total} total)")]
    SizeLimit {
        rows: usize,
        cols: usize,
        per_side: usize,
        total: usize,
    },

    #[error("KL divergence undefined: p[{index}] = {p} > 0 but q[{index}] = 0")]
    Support { index: usize, p: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("instance is not asymptotically scalable")]
    NotScalable,

    #[error("cycle detected in block DAG")]
    Cycle,

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("trace is missing potentials at iteration {0}; record every iteration to audit it")]
    MissingPotentials(usize),

    #[error("block {block} did not reach tolerance {tol:e} within {iters} iterations (best residual {residual:e})")]
    BlockNotConverged {
        block: usize,
        tol: f64,
        iters: usize,
        residual: f64,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("generation failed after {0} attempts")]
    RetryLimit(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
