use thiserror::Error;

/// Errors shared across the numerical kernel, sampling, and measure layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("kernel diverges at coincident points x = y = ({0}, {1})")]
    CoincidentPoints(f64, f64),

    #[error("point ({0}, {1}) lies outside the kernel domain")]
    OutOfDomain(f64, f64),

    #[error("point ({0}, {1}) is not among the tabulated kernel locations")]
    PointNotTabulated(f64, f64),

    #[error("operation not supported for this kernel variant: {0}")]
    UnsupportedKernel(&'static str),

    #[error(
        "quadrature did not converge after {levels} refinement levels \
         (last relative change {last_change:.3e}, tolerance {tol:.1e})"
    )]
    QuadratureNotConverged {
        levels: usize,
        last_change: f64,
        tol: f64,
    },

    #[error("quadrature nodes coincide at ({0}, {1}); kernel is singular there")]
    CoincidentQuadratureNodes(f64, f64),

    #[error("covariance matrix is not positive semidefinite (jitter up to {max_jitter:.1e} failed)")]
    NotPositiveSemidefinite { max_jitter: f64 },

    #[error("no mollified table for (family {family}, base_radius {base_radius}, eps {eps})")]
    MissingTable {
        family: &'static str,
        base_radius: f64,
        eps: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
