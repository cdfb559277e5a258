use crate::decompose::Decomposition;

/// Errors produced by the decomposition pipeline.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// Input sizes do not match the declared shape.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An index tuple or exponent is out of range.
    #[error("index out of range: {0}")]
    Index(String),

    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The linear system defining a generating-matrix column has no solution
    /// at the requested tolerance. The usual cause is a target rank below the
    /// actual symmetric rank of the tensor.
    #[error(
        "inconsistent generating system at border monomial {alpha:?} \
         (residual {residual:.3e} > {tol:.3e}); increase the value of r"
    )]
    InconsistentSystem {
        alpha: Vec<u32>,
        residual: f64,
        tol: f64,
    },

    /// Interpolation points whose basis-evaluation matrix is numerically
    /// singular; no generating matrix interpolates them.
    #[error("interpolation matrix is numerically singular (sigma_min/sigma_max = {0:.3e})")]
    SingularVandermonde(f64),

    /// The iterative solver exhausted its budget. Carries the best residual
    /// reached and, when the caller could assemble one, the best decomposition
    /// found so far.
    #[error("no convergence: best residual {best_residual:.3e} after {attempts} attempt(s)")]
    NoConvergence {
        best_residual: f64,
        attempts: usize,
        best: Option<Box<Decomposition>>,
    },

    /// A dense linear-algebra kernel failed (e.g. Schur iteration).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A required structural condition does not hold (e.g. a monomial is not
    /// reachable during tensor recovery).
    #[error("structure error: {0}")]
    Structure(String),

    /// Violated internal invariant; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// File parsing or serialization problem.
    #[error("format error: {0}")]
    Format(String),
}
