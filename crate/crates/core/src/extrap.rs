//! Truncation extrapolation: `lambda_min(N) ~ a0 + a1/N + a2/N^2`, fitted by
//! least squares, with `a0` taken as the `N -> infinity` limit.

use alloc::vec::Vec;

use crate::eigen::{min_eigen, Method, SolverKind};
use crate::error::{finite, Error, Result};
use crate::kernel::{build_kernel, RingParams};

/// Reference schedule for high-accuracy points.
pub const REFERENCE_SCHEDULE: [usize; 15] =
    [800, 1000, 1200, 1400, 1600, 1800, 2000, 2200, 2400, 3000, 4000, 5000, 6000, 8000, 10000];

/// Cheaper default for sweeps.
pub const SWEEP_SCHEDULE: [usize; 5] = [400, 600, 800, 1200, 1600];

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtrapolationFit {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// Sum of squared fit errors.
    pub residual: f64,
    /// Strictly increasing.
    pub n_values: Vec<usize>,
    pub lambda_values: Vec<f64>,
}

impl ExtrapolationFit {
    pub fn eval(&self, n: f64) -> f64 {
        let x = 1.0 / n;
        self.a0 + x * (self.a1 + x * self.a2)
    }

    /// `|a0 - lambda(N_max)| <= 10 |lambda(N_max) - lambda(N_prev)|`.
    pub fn sanity_band_ok(&self) -> bool {
        let k = self.lambda_values.len();
        let last = self.lambda_values[k - 1];
        let prev = self.lambda_values[k - 2];
        (self.a0 - last).abs() <= 10.0 * (last - prev).abs()
    }
}

/// Least-squares fit of `lambda` on `{1, 1/N, 1/N^2}`.
///
/// The abscissa is shifted and scaled onto `[-1, 1]` and the ordinates are
/// centered before a Householder QR solve; coefficients are mapped back
/// afterwards.
pub fn fit_quadratic(points: &[(usize, f64)]) -> Result<ExtrapolationFit> {
    let mut pts: Vec<(usize, f64)> = points.to_vec();
    pts.sort_by_key(|p| p.0);
    for w in pts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::RankDeficient(w[0].0));
        }
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, got: pts.len() });
    }
    if pts[0].0 == 0 {
        return Err(Error::InvalidParameter("truncation N must be positive"));
    }
    for p in &pts {
        finite("lambda", p.1)?;
    }

    let xs: Vec<f64> = pts.iter().map(|p| 1.0 / p.0 as f64).collect();
    let (xmin, xmax) = (xs[xs.len() - 1], xs[0]);
    let center = 0.5 * (xmax + xmin);
    let half = 0.5 * (xmax - xmin);
    let y_ref = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;

    let rows = pts.len();
    let mut design: Vec<[f64; 3]> = xs
        .iter()
        .map(|x| {
            let t = (x - center) / half;
            [1.0, t, t * t]
        })
        .collect();
    let mut rhs: Vec<f64> = pts.iter().map(|p| p.1 - y_ref).collect();
    let original_design = design.clone();
    let centered = rhs.clone();

    // Householder QR, applied to the right-hand side as we go.
    let mut r = [[0.0f64; 3]; 3];
    for j in 0..3 {
        let norm = libm::sqrt(design[j..].iter().map(|row| row[j] * row[j]).sum::<f64>());
        if norm == 0.0 {
            return Err(Error::RankDeficient(pts[j].0));
        }
        let alpha = -libm::copysign(norm, design[j][j]);
        let mut v: Vec<f64> = design[j..].iter().map(|row| row[j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            for col in j..3 {
                let s: f64 = v.iter().zip(&design[j..]).map(|(vi, row)| vi * row[col]).sum();
                let f = 2.0 * s / vv;
                for (vi, row) in v.iter().zip(design[j..].iter_mut()) {
                    row[col] -= f * vi;
                }
            }
            let s: f64 = v.iter().zip(&rhs[j..]).map(|(vi, b)| vi * b).sum();
            let f = 2.0 * s / vv;
            for (vi, b) in v.iter().zip(rhs[j..].iter_mut()) {
                *b -= f * vi;
            }
        }
        for col in j..3 {
            r[j][col] = design[j][col];
        }
    }
    let diag_scale = r[0][0].abs();
    if (0..3).any(|j| r[j][j].abs() <= 1e-13 * diag_scale * rows as f64) {
        return Err(Error::RankDeficient(pts[0].0));
    }
    let mut b = [0.0f64; 3];
    for j in (0..3).rev() {
        let mut s = rhs[j];
        for k in j + 1..3 {
            s -= r[j][k] * b[k];
        }
        b[j] = s / r[j][j];
    }

    let residual = original_design
        .iter()
        .zip(&centered)
        .map(|(row, y)| {
            let e = y - (b[0] * row[0] + b[1] * row[1] + b[2] * row[2]);
            e * e
        })
        .sum::<f64>();

    // y = b0 + b1 t + b2 t^2 with t = (x - c) / h
    let (c, h) = (center, half);
    let a2 = b[2] / (h * h);
    let a1 = b[1] / h - 2.0 * b[2] * c / (h * h);
    let a0 = y_ref + b[0] - b[1] * c / h + b[2] * (c / h) * (c / h);

    Ok(ExtrapolationFit {
        a0,
        a1,
        a2,
        residual,
        n_values: pts.iter().map(|p| p.0).collect(),
        lambda_values: pts.iter().map(|p| p.1).collect(),
    })
}

/// One eigen-solve in an extrapolation schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSolve {
    pub n_trunc: usize,
    pub lambda_min: f64,
    pub residual_norm: f64,
    pub method: SolverKind,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub params: RingParams,
    /// Estimate of the infimum, `a0`.
    pub p: f64,
    pub fit: ExtrapolationFit,
    pub solves: Vec<ScheduleSolve>,
    /// False when `a0` strays outside the sanity band; flagged, not fatal.
    pub sanity_ok: bool,
}

pub fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints { needed: MIN_FIT_POINTS, got: schedule.len() });
    }
    if schedule.iter().any(|&n| n < 1) {
        return Err(Error::InvalidParameter("schedule entries must be at least 1"));
    }
    let mut sorted = schedule.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RankDeficient(w[0]));
        }
    }
    Ok(())
}

/// Solves the truncated kernel at one `N`, attaching `N` to any failure.
pub fn solve_at(params: &RingParams, n_trunc: usize, method: Method) -> Result<ScheduleSolve> {
    let wrap = |e: Error| Error::AtTruncation { n: n_trunc, source: alloc::boxed::Box::new(e) };
    let config = params.with_truncation(n_trunc).map_err(wrap)?;
    let kernel = build_kernel(&config).map_err(wrap)?;
    let r = min_eigen(&kernel, method).map_err(wrap)?;
    Ok(ScheduleSolve {
        n_trunc,
        lambda_min: r.lambda_min,
        residual_norm: r.residual_norm,
        method: r.method,
        iterations: r.iterations,
    })
}

/// Fits already computed solves (in any order).
pub fn extrapolate_solves(params: RingParams, mut solves: Vec<ScheduleSolve>) -> Result<Extrapolated> {
    solves.sort_by_key(|s| s.n_trunc);
    let points: Vec<(usize, f64)> = solves.iter().map(|s| (s.n_trunc, s.lambda_min)).collect();
    let fit = fit_quadratic(&points)?;
    Ok(Extrapolated { params, p: fit.a0, sanity_ok: fit.sanity_band_ok(), fit, solves })
}

/// Runs the schedule sequentially and extrapolates to `N -> infinity`.
pub fn extrapolated_infimum(params: &RingParams, schedule: &[usize], method: Method) -> Result<Extrapolated> {
    validate_schedule(schedule)?;
    let solves = schedule.iter().map(|&n| solve_at(params, n, method)).collect::<Result<Vec<_>>>()?;
    extrapolate_solves(*params, solves)
}
