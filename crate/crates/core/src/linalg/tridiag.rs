//! Householder reduction to tridiagonal form, Sturm-sequence bisection for
//! the smallest eigenvalue, and inverse iteration for its eigenvector.

use alloc::vec;
use alloc::vec::Vec;

use super::{axpy, dot, norm2, try_vec, SymMatrix};
use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` has n entries, `off` has n - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Householder vectors `v_i` (with implicit leading 1) and scalars `tau_i`
/// such that `A = Q T Q^T` with `Q = H_0 H_1 ... H_{n-3}`.
struct Reflectors {
    vectors: Vec<Vec<f64>>,
    taus: Vec<f64>,
}

/// Reduces a copy of `a` to tridiagonal form. Only the lower triangle of the
/// working copy is touched.
///
/// Each step's rank-2 update `A22 -= v w^T + w v^T` is deferred and fused with
/// the next step's product `A22 v'`, so the trailing block is streamed once
/// per step instead of twice.
fn tridiagonalize(a: &SymMatrix, keep_reflectors: bool) -> Result<(Tridiagonal, Option<Reflectors>)> {
    let n = a.dim();
    let mut w = try_vec(n * n, 0.0).map_err(|_| Error::Allocation { dim: n })?;
    w.copy_from_slice(a.as_slice());

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut refl = keep_reflectors.then(|| Reflectors {
        vectors: Vec::with_capacity(n.saturating_sub(2)),
        taus: Vec::with_capacity(n.saturating_sub(2)),
    });

    // deferred update (v, w) on the block starting at row/column `i`
    let mut pending: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut p = vec![0.0; n];

    for i in 0..n.saturating_sub(1) {
        let s = i + 1;
        let m = n - s;

        if let Some((pv, pw)) = &pending {
            for r in i..n {
                w[r * n + i] -= pv[r - i] * pw[0] + pw[r - i] * pv[0];
            }
        }
        diag[i] = w[i * n + i];

        let mut v: Vec<f64> = (0..m).map(|k| w[(s + k) * n + i]).collect();
        let (tau, beta) = householder(&mut v);
        off[i] = beta;
        if let Some(r) = refl.as_mut() {
            if m > 1 {
                r.vectors.push(v.clone());
                r.taus.push(tau);
            }
        }

        let p = &mut p[..m];
        p.iter_mut().for_each(|x| *x = 0.0);
        for r in s..n {
            let a_loc = r - s;
            let row = &mut w[r * n + s..=r * n + r];
            if let Some((pv, pw)) = &pending {
                // block offset i: local index of (r, c) is (r - i, c - i)
                let (vr, wr) = (pv[r - i], pw[r - i]);
                for ((x, vc), wc) in row.iter_mut().zip(&pv[1..]).zip(&pw[1..]) {
                    *x -= vr * wc + wr * vc;
                }
            }
            if tau != 0.0 {
                let (lower, d) = row.split_at(a_loc);
                p[a_loc] += dot(lower, &v[..a_loc]) + d[0] * v[a_loc];
                axpy(v[a_loc], lower, &mut p[..a_loc]);
            }
        }

        pending = if tau != 0.0 {
            p.iter_mut().for_each(|x| *x *= tau);
            let alpha = -0.5 * tau * dot(p, &v);
            axpy(alpha, &v, p);
            Some((v, p.to_vec()))
        } else {
            None
        };
    }
    if n > 0 {
        if let Some((pv, pw)) = &pending {
            w[(n - 1) * n + (n - 1)] -= 2.0 * pv[0] * pw[0];
        }
        diag[n - 1] = w[(n - 1) * n + (n - 1)];
    }
    Ok((Tridiagonal { diag, off }, refl))
}

/// Overwrites `x` with the Householder vector (leading entry 1) that maps
/// `x` to `beta e_1`. Returns `(tau, beta)`.
fn householder(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    if xnorm == 0.0 {
        x[0] = 1.0;
        return (0.0, alpha);
    }
    let beta = -libm::copysign(libm::hypot(alpha, xnorm), alpha);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    x[0] = 1.0;
    x[1..].iter_mut().for_each(|v| *v *= scale);
    (tau, beta)
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        let emax = self.off.iter().fold(1.0f64, |acc, e| acc.max(e * e));
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        self.sturm_count_with(x, pivmin)
    }

    fn sturm_count_with(&self, x: f64, pivmin: f64) -> usize {
        let mut q = self.diag[0] - x;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        let mut count = usize::from(q < 0.0);
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            count += usize::from(q < 0.0);
        }
        count
    }

    /// Smallest eigenvalue by bisection on the Sturm count.
    pub fn smallest_eigenvalue(&self) -> f64 {
        assert!(self.dim() > 0, "empty tridiagonal matrix");
        if self.dim() == 1 {
            return self.diag[0];
        }
        let pivmin = self.pivmin();
        let (gl, gu) = self.gershgorin();
        let spread = gl.abs().max(gu.abs());
        let pad = 2.0 * f64::EPSILON * spread * self.dim() as f64 + 2.0 * pivmin;
        let mut lo = gl - pad;
        let mut hi = gu + pad;
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.sturm_count_with(mid, pivmin) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an (accurate) eigenvalue `lambda` by inverse
    /// iteration with a partially pivoted LU of `T - lambda I`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let (gl, gu) = self.gershgorin();
        let tnorm = gl.abs().max(gu.abs()).max(f64::MIN_POSITIVE);
        let lu = TridiagLu::factor(self, lambda, f64::EPSILON * tnorm);

        // deterministic, non-degenerate start vector
        let mut y: Vec<f64> = (0..n)
            .map(|i| {
                let t = (i as f64 + 1.0) * 0.618_033_988_749_894_8;
                1.0 + 0.5 * (t - libm::floor(t))
            })
            .collect();
        let growth_target = 1.0 / (f64::EPSILON * tnorm * 16.0);
        for iter in 0..6 {
            let norm_in = norm2(&y);
            y.iter_mut().for_each(|v| *v /= norm_in);
            lu.solve(&mut y);
            let growth = norm2(&y);
            if iter >= 1 && growth >= growth_target.min(1e10) {
                break;
            }
        }
        let norm = norm2(&y);
        y.iter_mut().for_each(|v| *v /= norm);
        y
    }
}

struct TridiagLu {
    u1: Vec<f64>,
    u2: Vec<f64>,
    u3: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &Tridiagonal, lambda: f64, tiny: f64) -> Self {
        let n = t.dim();
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut u3 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        // carried row: `d` at column i, `e` at column i + 1
        let mut d = t.diag[0] - lambda;
        let mut e = t.off[0];
        for i in 0..n - 1 {
            let sub = t.off[i];
            let nd = t.diag[i + 1] - lambda;
            let ne = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if d.abs() >= sub.abs() {
                let m = if d != 0.0 { sub / d } else { 0.0 };
                mult[i] = m;
                u1[i] = d;
                u2[i] = e;
                d = nd - m * e;
                e = ne;
            } else {
                let m = d / sub;
                mult[i] = m;
                swapped[i] = true;
                u1[i] = sub;
                u2[i] = nd;
                u3[i] = ne;
                d = e - m * nd;
                e = -m * ne;
            }
        }
        u1[n - 1] = d;
        for u in u1.iter_mut() {
            if u.abs() < tiny {
                *u = if *u < 0.0 { -tiny } else { tiny };
            }
        }
        Self { u1, u2, u3, mult, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        b[n - 1] /= self.u1[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.u2[n - 2] * b[n - 1]) / self.u1[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u2[i] * b[i + 1] - self.u3[i] * b[i + 2]) / self.u1[i];
        }
    }
}

/// Smallest eigenvalue (and optionally its unit eigenvector) of a dense
/// symmetric matrix via full tridiagonal reduction.
pub fn dense_smallest(a: &SymMatrix, want_vector: bool) -> Result<(f64, Option<Vec<f64>>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("matrix dimension must be positive"));
    }
    let (tri, refl) = tridiagonalize(a, want_vector)?;
    let lambda = tri.smallest_eigenvalue();
    let vector = refl.map(|r| {
        let mut x = tri.eigenvector(lambda);
        for (k, (v, &tau)) in r.vectors.iter().zip(&r.taus).enumerate().rev() {
            if tau == 0.0 {
                continue;
            }
            let tail = &mut x[k + 1..];
            let proj = tau * dot(v, tail);
            axpy(-proj, v, tail);
        }
        x
    });
    Ok((lambda, vector))
}
