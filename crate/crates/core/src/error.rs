use alloc::boxed::Box;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficients not normalized: |c|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("quadratic form has imaginary part {imag}")]
    NotReal { imag: f64 },

    #[error("cannot allocate a {dim}x{dim} matrix")]
    Allocation { dim: usize },

    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("eigen-residual {residual:e} exceeds certification bound {bound:e}")]
    Uncertified { residual: f64, bound: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("rank-deficient fit: duplicate truncation N = {0}")]
    RankDeficient(usize),

    #[error("solve failed at N = {n}: {source}")]
    AtTruncation { n: usize, source: Box<Error> },
}

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::InvalidParameter(_)
            | Error::DimensionMismatch { .. }
            | Error::NotNormalized { .. }
            | Error::TooFewPoints { .. }
            | Error::RankDeficient(_) => true,
            Error::AtTruncation { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
