use std::fmt;

/// Errors reported by the design and compensation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameter combination violates an invariant (e.g. `p > n - 1`).
    InvalidParams(String),
    /// The coefficient normalization sum was not strictly positive.
    DegenerateNormalization(f64),
    /// The response never crosses the cutoff level on (0, 1).
    DegenerateResponse,
    /// An adaptive quadrature failed to converge within the node budget.
    QuadratureNoConvergence { nodes: usize, last_delta: f64 },
    /// The one-sided Jacobi SVD did not converge within the sweep cap.
    SvdNoConvergence { sweeps: usize, off_diagonal: f64 },
    /// `q` would zero every singular-value inverse, removing all directions.
    AllDirectionsRemoved { q: usize, rank: usize },
    /// No `(n, p)` within the search bounds meets the design targets.
    Infeasible(String),
    /// Exact integer arithmetic in the preconditioner check left its range.
    ExactArithmetic(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::DegenerateNormalization(s) => {
                write!(f, "degenerate normalization: sample sum {s} is not positive")
            }
            Error::DegenerateResponse => {
                write!(f, "degenerate response: no cutoff crossing in (0, 1)")
            }
            Error::QuadratureNoConvergence { nodes, last_delta } => write!(
                f,
                "quadrature did not converge ({nodes} nodes, last delta {last_delta:e})"
            ),
            Error::SvdNoConvergence { sweeps, off_diagonal } => write!(
                f,
                "svd did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})"
            ),
            Error::AllDirectionsRemoved { q, rank } => write!(
                f,
                "q = {q} would remove all {rank} directions of the solve"
            ),
            Error::Infeasible(msg) => write!(f, "design targets infeasible: {msg}"),
            Error::ExactArithmetic(msg) => write!(f, "exact arithmetic: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
