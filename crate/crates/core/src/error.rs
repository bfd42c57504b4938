use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A domain description violates one of its invariants.
    #[error("invalid domain: {0}")]
    InvalidSpec(String),

    /// An argument is outside the range an operation is defined on.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Rasterization produced no interior cell.
    #[error("rasterization produced no interior cell (h = {h})")]
    EmptyRaster { h: f64 },

    /// A kernel was evaluated at a coincident source/evaluation point.
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    /// A point lies outside the wedge or sector it was evaluated in.
    #[error("point ({x}, {y}) lies outside the wedge")]
    PointOutsideWedge { x: f64, y: f64 },

    /// The sector series could not reach the requested tolerance.
    #[error("series truncation failed after {terms} terms (tail bound {tail:e} > tolerance {tolerance:e})")]
    TruncationFailure { terms: usize, tail: f64, tolerance: f64 },

    /// An iterative solver ran out of its iteration budget.
    #[error("solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A requested set mass cannot be realized on the grid.
    #[error("mass {mass} is infeasible on a domain of area {area}")]
    MassInfeasible { mass: f64, area: f64 },

    /// A comparison that requires a nonnegative field received one with
    /// essential infimum below the tolerance.
    #[error("field is not nonnegative (minimum {min:e})")]
    NotNonnegative { min: f64 },

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to: configuration problems
    /// exit with 1, numerical/runtime failures with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec(_) | Error::InvalidInput(_) | Error::Config(_) => 1,
            _ => 2,
        }
    }
}
