//! The free-line limit. As `alpha -> 0` the ring problem turns into the
//! integral eigenproblem
//! `(1/pi) int_0^inf (u + v) sinc(u^2 - v^2) f(v) dv = lambda f(u)`
//! whose spectral infimum is `-c_line`. Two routes are offered: the ring
//! kernel at small `alpha` (with `u = m sqrt(alpha)`), and a midpoint
//! Nystrom discretization of the integral operator truncated at `u_max`.

use core::f64::consts::PI;

use alloc::vec::Vec;

use crate::eigen::{min_eigenvalue, Method};
use crate::error::{finite, Error, Result};
use crate::kernel::{build_kernel, RingParams};
use crate::linalg::SymMatrix;
use crate::math::sinc;

/// Published Bracken-Melloy constant.
pub const C_LINE: f64 = 0.0384517;

/// Below this `n_trunc sqrt(alpha)` the ring route does not reach far enough in `u`.
pub const MIN_U_COVERAGE: f64 = 8.0;

/// Uniform midpoint grid on `(0, u_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    u_max: f64,
    n_points: usize,
}

impl LineGrid {
    pub fn new(u_max: f64, n_points: usize) -> Result<Self> {
        finite("u_max", u_max)?;
        if u_max <= 0.0 {
            return Err(Error::InvalidParameter("u_max must be positive"));
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter("line grid needs at least two points"));
        }
        Ok(Self { u_max, n_points })
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.u_max / self.n_points as f64
    }

    /// `u_i = (i + 1/2) h`.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }
}

/// `A_ij = (h/pi)(u_i + u_j) sinc(u_i^2 - u_j^2)`.
pub fn line_kernel(grid: &LineGrid) -> Result<SymMatrix> {
    let h = grid.spacing();
    let u = grid.nodes();
    SymMatrix::from_upper_fn(grid.n_points, |i, j| h / PI * (u[i] + u[j]) * sinc(u[i] * u[i] - u[j] * u[j]))
}

/// Smallest eigenvalue of the Nystrom matrix; approximates `-c_line`.
pub fn nystrom_min(grid: &LineGrid, method: Method) -> Result<f64> {
    min_eigenvalue(&line_kernel(grid)?, method)
}

/// `(u_max, n_points, lambda_min)` over successive doublings of both.
pub fn nystrom_convergence(start: &LineGrid, doublings: usize, method: Method) -> Result<Vec<(f64, usize, f64)>> {
    let mut out = Vec::with_capacity(doublings + 1);
    let mut g = *start;
    for k in 0..=doublings {
        if k > 0 {
            g = LineGrid::new(2.0 * g.u_max, 2 * g.n_points)?;
        }
        out.push((g.u_max, g.n_points, nystrom_min(&g, method)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAlphaLimit {
    pub lambda_min: f64,
    /// `n_trunc sqrt(alpha)`: the largest `u` the ring modes reach.
    pub u_coverage: f64,
    /// `u_coverage < MIN_U_COVERAGE`.
    pub undercovered: bool,
}

/// Smallest eigenvalue of the ring kernel, read as an estimate of `-c_line`
/// for small `alpha`.
pub fn ring_small_alpha_limit(params: &RingParams, n_trunc: usize, method: Method) -> Result<SmallAlphaLimit> {
    let config = params.with_truncation(n_trunc)?;
    let kernel = build_kernel(&config)?;
    let lambda_min = min_eigenvalue(kernel.matrix(), method)?;
    let u_coverage = n_trunc as f64 * libm::sqrt(params.alpha());
    Ok(SmallAlphaLimit { lambda_min, u_coverage, undercovered: u_coverage < MIN_U_COVERAGE })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        let g = LineGrid::new(10.0, 7).unwrap();
        let nodes = g.nodes();
        assert!(nodes[0] > 0.0);
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert!((g.spacing() * 7.0 - 10.0).abs() < 1e-12);
        assert!(LineGrid::new(0.0, 5).is_err());
        assert!(LineGrid::new(1.0, 1).is_err());
        assert!(LineGrid::new(f64::NAN, 5).is_err());
    }

    #[test]
    fn kernel_symmetry_and_diagonal() {
        let g = LineGrid::new(3.0, 25).unwrap();
        let a = line_kernel(&g).unwrap();
        for i in 0..25 {
            for j in 0..25 {
                assert_eq!(a.get(i, j).to_bits(), a.get(j, i).to_bits());
            }
            let expect = g.spacing() / PI * 2.0 * g.node(i);
            assert!((a.get(i, i) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn coverage_flag() {
        let p = RingParams::new(1e-3, 0.0).unwrap();
        let r = ring_small_alpha_limit(&p, 100, Method::Dense).unwrap();
        assert!(r.undercovered);
        let r = ring_small_alpha_limit(&RingParams::new(PI, 0.0).unwrap(), 20, Method::Dense).unwrap();
        assert!(!r.undercovered);
        assert!(r.lambda_min.abs() <= 1e-12);
    }
}
