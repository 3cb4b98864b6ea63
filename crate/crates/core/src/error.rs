use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid distribution parameters, arithmetic mode or experiment setup.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("index ({i}, {j}) outside environment extent ({m}, {n})")]
    Bounds { i: usize, j: usize, m: usize, n: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("full grid of {cells} cells exceeds the memory budget of {budget} cells")]
    Resource { cells: usize, budget: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A recomputed identity did not hold; this signals a DP bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("path enumeration budget exceeded: m + n = {0} > {1}")]
    Budget(usize, usize),
    #[error("no closed-form limit shape for {0}")]
    UnsupportedClosedForm(String),
    #[error("empty sample")]
    EmptySample,
    #[error("reference table load error: {0}")]
    TableLoad(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
