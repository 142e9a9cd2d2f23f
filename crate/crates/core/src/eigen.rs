//! Smallest eigenpair of a truncated backflow kernel. The smallest eigenvalue
//! is the infimum of the integrated current over states in the truncated
//! mode space; its eigenvector is a minimizing state.
//!
//! Every result carries an explicit residual `||K v - lambda v||_2` checked
//! against `RESIDUAL_BOUND * max|K_mn|`; nothing is returned uncertified.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::BackflowKernel;
use crate::linalg::{dense_smallest, fix_sign, lanczos_smallest, LanczosOptions, SymMatrix};

/// Relative eigen-residual bound for certification.
pub const RESIDUAL_BOUND: f64 = 1e-10;
/// Above this dimension `Method::Auto` switches to Lanczos.
pub const AUTO_DENSE_LIMIT: usize = 4001;
/// Components below this magnitude are skipped by the sign convention.
pub const SIGN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Householder tridiagonalization followed by bisection.
    Dense,
    /// Lanczos with full reorthogonalization.
    Iterative,
    /// Dense up to `AUTO_DENSE_LIMIT`, iterative beyond.
    #[default]
    Auto,
}

/// The solver that actually produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Dense,
    Iterative,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Dense => "dense",
            SolverKind::Iterative => "iterative",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub lambda_min: f64,
    /// Unit 2-norm; first component above `SIGN_TOLERANCE` is positive.
    pub eigenvector: Vec<f64>,
    pub n_trunc: usize,
    pub residual_norm: f64,
    pub method: SolverKind,
    /// Lanczos steps taken; zero for the dense path.
    pub iterations: usize,
}

/// Smallest eigenpair of an arbitrary dense symmetric matrix, certified.
/// `n_trunc` in the result is `dim - 1`.
pub fn smallest_eigenpair(matrix: &SymMatrix, method: Method) -> Result<EigenResult> {
    let dim = matrix.dim();
    if dim == 0 {
        return Err(Error::InvalidParameter("matrix dimension must be positive"));
    }
    let kind = match method {
        Method::Dense => SolverKind::Dense,
        Method::Iterative => SolverKind::Iterative,
        Method::Auto if dim <= AUTO_DENSE_LIMIT => SolverKind::Dense,
        Method::Auto => SolverKind::Iterative,
    };
    let (lambda, mut vector, iterations) = match kind {
        SolverKind::Dense => {
            let (lambda, v) = dense_smallest(matrix, true)?;
            (lambda, v.expect("eigenvector requested"), 0)
        }
        SolverKind::Iterative => {
            let out = lanczos_smallest(matrix, &LanczosOptions::default())?;
            (out.value, out.vector, out.iterations)
        }
    };
    fix_sign(&mut vector, SIGN_TOLERANCE);
    let residual_norm = matrix.residual_norm(lambda, &vector);
    let bound = RESIDUAL_BOUND * matrix.max_abs().max(f64::MIN_POSITIVE);
    if residual_norm.is_nan() || residual_norm > bound {
        return Err(Error::Uncertified { residual: residual_norm, bound });
    }
    Ok(EigenResult {
        lambda_min: lambda,
        eigenvector: vector,
        n_trunc: dim - 1,
        residual_norm,
        method: kind,
        iterations,
    })
}

/// Smallest eigenpair of a backflow kernel.
pub fn min_eigen(kernel: &BackflowKernel, method: Method) -> Result<EigenResult> {
    let mut r = smallest_eigenpair(kernel.matrix(), method)?;
    r.n_trunc = kernel.config().n_trunc();
    Ok(r)
}

/// Eigenvalue only; skips eigenvector work on the dense path.
pub fn min_eigenvalue(matrix: &SymMatrix, method: Method) -> Result<f64> {
    match method {
        Method::Dense => Ok(dense_smallest(matrix, false)?.0),
        Method::Auto if matrix.dim() <= AUTO_DENSE_LIMIT => Ok(dense_smallest(matrix, false)?.0),
        _ => smallest_eigenpair(matrix, method).map(|r| r.lambda_min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_kernel, RingConfig};

    #[test]
    fn zero_at_alpha_pi() {
        for n in [1usize, 5, 40] {
            let k = build_kernel(&RingConfig::new(core::f64::consts::PI, 0.0, n).unwrap()).unwrap();
            for method in [Method::Dense, Method::Iterative] {
                let r = min_eigen(&k, method).unwrap();
                assert!(r.lambda_min.abs() <= 1e-12, "{method:?}: {}", r.lambda_min);
                assert!((r.eigenvector[0] - 1.0).abs() < 1e-12);
                assert_eq!(r.n_trunc, n);
            }
        }
    }

    #[test]
    fn result_invariants() {
        let k = build_kernel(&RingConfig::from_alpha_over_pi(0.37, -0.2, 120).unwrap()).unwrap();
        let r = min_eigen(&k, Method::Dense).unwrap();
        let norm: f64 = r.eigenvector.iter().map(|v| v * v).sum::<f64>();
        assert!((norm.sqrt() - 1.0).abs() < 1e-12);
        assert!(r.eigenvector[0] > 0.0);
        let dmin = k.matrix().diagonal().fold(f64::INFINITY, f64::min);
        assert!(r.lambda_min <= dmin);
        assert!(r.residual_norm <= 1e-10 * k.matrix().max_abs());
        assert_eq!(r.method, SolverKind::Dense);
    }

    #[test]
    fn auto_picks_dense_for_small() {
        let k = build_kernel(&RingConfig::from_alpha_over_pi(0.5, 0.0, 10).unwrap()).unwrap();
        assert_eq!(min_eigen(&k, Method::Auto).unwrap().method, SolverKind::Dense);
    }
}
