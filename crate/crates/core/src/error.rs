use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("N = {n} does not fill a complete shell (nearest admissible counts: {below} below, {above} above)")]
    IncompleteShell { n: usize, below: usize, above: usize },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },

    #[error("momentum cutoff too small: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    CutoffTooSmall { tail: f64, tol: f64 },

    #[error("no sign change of the boundary mismatch in eigenvalue window [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("radial integration failed: {0}")]
    Integrator(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("density mismatch: ({0}, {1}) vs ({2}, {3})")]
    DensityMismatch(f64, f64, f64, f64),

    #[error("empty sector: ({up}, {down}) cannot be realised on the mode set")]
    EmptySector { up: i64, down: i64 },

    #[error("identity violated: residual {residual:e} exceeds {threshold:e}")]
    IdentityViolation { residual: f64, threshold: f64 },

    #[error("matrix exponential failed to converge (generator norm {norm:e})")]
    Exponential { norm: f64 },
}
