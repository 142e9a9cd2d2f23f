//! Dense symmetric matrices and the smallest-eigenpair solvers behind
//! [`crate::eigen`].

mod lanczos;
mod tridiag;

pub use lanczos::{lanczos_smallest, LanczosOptions, LanczosOutcome};
pub use tridiag::{dense_smallest, Tridiagonal};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square symmetric matrix in full row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Zero matrix; fails instead of aborting when the buffer cannot be allocated.
    pub fn try_zeros(dim: usize) -> Result<Self> {
        let len = dim.checked_mul(dim).ok_or(Error::Allocation { dim })?;
        let data = try_vec(len, 0.0).map_err(|_| Error::Allocation { dim })?;
        Ok(Self { dim, data })
    }

    /// Builds the matrix from an upper-triangle generator; the lower triangle
    /// is mirrored so the result is bitwise symmetric.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::try_zeros(dim)?;
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.data[i * dim + j] = v;
                m.data[j * dim + i] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim).map(move |i| self.get(i, i))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| f64::max(acc, v.abs()))
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    /// `||A x - lambda x||_2`.
    pub fn residual_norm(&self, lambda: f64, x: &[f64]) -> f64 {
        let mut sq = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let r = dot(self.row(i), x) - lambda * xi;
            sq += r * r;
        }
        libm::sqrt(sq)
    }
}

pub(crate) fn try_vec(len: usize, fill: f64) -> core::result::Result<Vec<f64>, ()> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| ())?;
    v.resize(len, fill);
    Ok(v)
}

/// Dot product with four independent accumulators.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

/// `y += alpha * x`.
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    // scaled to avoid overflow on huge entries
    let scale = x.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * libm::sqrt(s)
}

/// Makes the first component with magnitude above `tol` positive.
pub(crate) fn fix_sign(x: &mut [f64], tol: f64) {
    if let Some(first) = x.iter().find(|v| v.abs() > tol) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_fn_mirrors() {
        let m = SymMatrix::from_upper_fn(4, |i, j| (i * 10 + j) as f64).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.get(3, 1), 13.0);
    }

    #[test]
    fn oversized_allocation_is_an_error() {
        assert_eq!(SymMatrix::try_zeros(usize::MAX / 2).unwrap_err(), Error::Allocation { dim: usize::MAX / 2 });
        // fits in usize but not in memory
        assert!(matches!(SymMatrix::try_zeros(1 << 31), Err(Error::Allocation { .. })));
    }

    #[test]
    fn dot_handles_remainders() {
        let a: Vec<f64> = (1..=7).map(f64::from).collect();
        assert_eq!(dot(&a, &a), 140.0);
    }
}
