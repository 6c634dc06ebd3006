use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("biquaternion is a zero divisor: |N(W)| = {norm:.3e} <= {tol:.3e}")]
    SingularBiquaternion { norm: f64, tol: f64 },
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("symbol Hessian is not symmetric (asymmetry {0:.3e})")]
    NonSymmetricInput(f64),
    #[error("delta0 is not real and positive at t = {t}: {detail}")]
    NonRealDelta0 { t: f64, detail: String },
    #[error("eigenvector basis is singular (nu = {0})")]
    DegenerateEigenbasis(f64),
    #[error("quadrature did not reach tolerance {tol:.1e} (estimate {estimate:.3e})")]
    QuadratureNotConverged { tol: f64, estimate: f64 },
    #[error("grid under-resolved: refinement changed {what} by {rel:.3e}")]
    GridUnderResolved { what: &'static str, rel: f64 },
    #[error("unknown operator label `{0}`")]
    UnknownLabel(String),
    #[error("matrix exponential did not produce a finite result")]
    ExpNotConverged,
    #[error("power iteration stalled after {iters} iterations (last change {change:.3e})")]
    PowerIterationStalled { iters: usize, change: f64 },
    #[error("truncation not converged: {label} changed by {rel:.3e} between levels")]
    TruncationNotConverged { label: String, rel: f64 },
    #[error("right-hand Gram matrix is not positive definite")]
    IndefinitePencil,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
