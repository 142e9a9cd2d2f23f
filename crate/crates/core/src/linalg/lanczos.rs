//! Lanczos iteration with full reorthogonalization for the smallest
//! eigenpair of a dense symmetric matrix.

use alloc::vec;
use alloc::vec::Vec;

use super::{axpy, dot, norm2, try_vec, SymMatrix, Tridiagonal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Iteration cap (also capped by the matrix dimension).
    pub max_iterations: usize,
    /// Stop once the Ritz residual drops below `tolerance * max|A_ij|`.
    pub tolerance: f64,
    /// Ritz values are recomputed every `check_every` steps.
    pub check_every: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_iterations: 4000, tolerance: 1e-12, check_every: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Runs Lanczos from the normalized all-ones start vector.
pub fn lanczos_smallest(a: &SymMatrix, opts: &LanczosOptions) -> Result<LanczosOutcome> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("matrix dimension must be positive"));
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        let mut vector = vec![0.0; n];
        vector[0] = 1.0;
        return Ok(LanczosOutcome { value: 0.0, vector, iterations: 0, residual: 0.0 });
    }
    let kmax = opts.max_iterations.min(n).max(1);
    let target = opts.tolerance * scale;
    let breakdown = 1e-14 * scale;

    let mut basis = try_vec(0, 0.0).map_err(|_| Error::Allocation { dim: n })?;
    basis.try_reserve_exact(n * kmax.min(64)).map_err(|_| Error::Allocation { dim: n })?;
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut q = vec![1.0 / libm::sqrt(n as f64); n];
    let mut w = vec![0.0; n];
    let mut last_estimate = f64::INFINITY;

    for k in 0..kmax {
        basis.try_reserve(n).map_err(|_| Error::Allocation { dim: n })?;
        basis.extend_from_slice(&q);

        a.matvec(&q, &mut w);
        let alpha = dot(&q, &w);
        alphas.push(alpha);
        axpy(-alpha, &q, &mut w);
        if k > 0 {
            let prev = &basis[(k - 1) * n..k * n];
            axpy(-betas[k - 1], prev, &mut w);
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for j in 0..=k {
                let qj = &basis[j * n..(j + 1) * n];
                let c = dot(qj, &w);
                axpy(-c, qj, &mut w);
            }
        }
        let beta = norm2(&w);
        let steps = k + 1;
        let exhausted = beta <= breakdown || steps == kmax;

        if exhausted || (steps >= 2 && steps % opts.check_every.max(1) == 0) {
            let t = Tridiagonal { diag: alphas.clone(), off: betas.clone() };
            let theta = t.smallest_eigenvalue();
            let s = t.eigenvector(theta);
            let estimate = beta * s[steps - 1].abs();
            last_estimate = estimate;
            if estimate <= target || beta <= breakdown {
                let mut x = vec![0.0; n];
                for (j, sj) in s.iter().enumerate() {
                    axpy(*sj, &basis[j * n..(j + 1) * n], &mut x);
                }
                let nx = norm2(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                let residual = a.residual_norm(theta, &x);
                if residual <= 10.0 * target || beta <= breakdown || steps == n {
                    return Ok(LanczosOutcome { value: theta, vector: x, iterations: steps, residual });
                }
                last_estimate = residual;
            }
            if exhausted {
                break;
            }
        }
        betas.push(beta);
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi = wi / beta;
        }
    }
    Err(Error::NoConvergence { iterations: alphas.len(), residual: last_estimate })
}
