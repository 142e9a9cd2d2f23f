//! Closed-form analysis of superpositions of two modes `m1 < m2`:
//! `c_{m1} = cos(phi/2)`, `c_{m2} = e^{i gamma} sin(phi/2)`.
//!
//! Mode indices are taken relative to the raw flux. With `A = m1 + m2 - 2 beta`
//! and `B = m2 - m1`, the integrated current is
//! `(alpha/pi) [A - B cos phi + A sinc(alpha A B) cos gamma sin phi]`
//! and its minimum over the two angles is
//! `(alpha/pi) (A - sqrt(B^2 + A^2 sinc^2(alpha A B)))`.

use core::f64::consts::PI;

use alloc::vec::Vec;

use crate::error::{finite, Error, Result};
use crate::kernel::{canonicalize, RingParams};
use crate::math::sinc_pi;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeResult {
    pub p_min: f64,
    pub phi_star: f64,
    pub gamma_star: f64,
    pub a_val: f64,
    pub b_val: f64,
    /// `A sinc(alpha A B) = 0`: gamma has no effect and `gamma_star` is 0 by convention.
    pub degenerate: bool,
}

/// `(A, B, A sinc(alpha A B))` for raw modes under `params`.
fn coefficients(m1: u64, m2: u64, params: &RingParams) -> Result<(f64, f64, f64)> {
    if m1 >= m2 {
        return Err(Error::InvalidParameter("two-mode analysis needs m1 < m2"));
    }
    // both modes must carry nonnegative kinetic angular momentum
    if (m1 as i128) < i128::from(params.shift()) {
        return Err(Error::InvalidParameter("mode m1 lies below ceil(beta)"));
    }
    let shift = params.shift() as f64;
    let a = (m1 as f64 - shift) + (m2 as f64 - shift) - 2.0 * params.beta();
    let b = (m2 - m1) as f64;
    let s = a * sinc_pi(params.alpha_over_pi() * a * b);
    Ok((a, b, s))
}

/// Integrated current of the two-mode state at angles `(phi, gamma)`.
pub fn two_mode_p(m1: u64, m2: u64, params: &RingParams, phi: f64, gamma: f64) -> Result<f64> {
    finite("phi", phi)?;
    finite("gamma", gamma)?;
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::InvalidParameter("phi must lie in [0, pi]"));
    }
    if !(0.0..2.0 * PI).contains(&gamma) {
        return Err(Error::InvalidParameter("gamma must lie in [0, 2 pi)"));
    }
    let (a, b, s) = coefficients(m1, m2, params)?;
    Ok(params.alpha_over_pi() * (a - b * libm::cos(phi) + s * libm::cos(gamma) * libm::sin(phi)))
}

/// Minimum over `(phi, gamma)` in closed form, with a minimizer.
pub fn minimize_two_mode(m1: u64, m2: u64, params: &RingParams) -> Result<TwoModeResult> {
    let (a, b, s) = coefficients(m1, m2, params)?;
    let p_min = params.alpha_over_pi() * (a - libm::sqrt(b * b + s * s));
    Ok(TwoModeResult {
        p_min,
        phi_star: libm::atan2(s.abs(), b),
        gamma_star: if s > 0.0 { PI } else { 0.0 },
        a_val: a,
        b_val: b,
        degenerate: s == 0.0,
    })
}

/// Search box and resolution for [`global_two_mode_min_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSearch {
    /// Upper end of the `alpha/pi` box; the lower end is open at 0.
    pub alpha_over_pi_max: f64,
    /// Pin the flux (relative to `m1`, canonical frame) instead of searching it.
    pub fixed_beta: Option<f64>,
    pub coarse_alpha: usize,
    pub coarse_beta: usize,
    pub refine_rounds: usize,
}

impl Default for TwoModeSearch {
    fn default() -> Self {
        Self { alpha_over_pi_max: 2.0, fixed_beta: None, coarse_alpha: 400, coarse_beta: 100, refine_rounds: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeOptimum {
    pub alpha_over_pi: f64,
    /// Raw flux at the optimum; lies in `(m1 - 1, m1]`.
    pub beta: f64,
    pub p: f64,
}

/// Global minimum over `alpha` and the flux window `(m1 - 1, m1]` in which
/// `m1` is the lowest admissible mode.
pub fn global_two_mode_min(m1: u64, m2: u64) -> Result<TwoModeOptimum> {
    global_two_mode_min_with(m1, m2, &TwoModeSearch::default())
}

pub fn global_two_mode_min_with(m1: u64, m2: u64, search: &TwoModeSearch) -> Result<TwoModeOptimum> {
    if m1 >= m2 {
        return Err(Error::InvalidParameter("two-mode analysis needs m1 < m2"));
    }
    finite("alpha_over_pi_max", search.alpha_over_pi_max)?;
    if search.alpha_over_pi_max <= 0.0 {
        return Err(Error::InvalidParameter("alpha box must be nonempty"));
    }
    if let Some(b) = search.fixed_beta {
        let (canon, shift) = canonicalize(b)?;
        if shift != 0 || canon != b {
            return Err(Error::InvalidParameter("fixed beta must lie in (-1, 0]"));
        }
    }
    // In the canonical frame of m1 the modes are (0, m2 - m1).
    let gap = m2 - m1;
    let objective = |x: f64, beta: f64| -> f64 {
        let a = gap as f64 - 2.0 * beta;
        let b = gap as f64;
        let s = a * sinc_pi(x * a * b);
        x * (a - libm::sqrt(b * b + s * s))
    };

    let amax = search.alpha_over_pi_max;
    let beta_lo = -1.0 + 1e-9;
    let na = search.coarse_alpha.max(2);
    let nb = search.coarse_beta.max(2);
    let betas: Vec<f64> = match search.fixed_beta {
        Some(b) => alloc::vec![b],
        None => (0..nb).map(|j| beta_lo + (0.0 - beta_lo) * j as f64 / (nb - 1) as f64).collect(),
    };

    let mut best = (amax, betas[0], f64::INFINITY);
    for i in 1..=na {
        let x = amax * i as f64 / na as f64;
        for &b in &betas {
            let v = objective(x, b);
            if v < best.2 {
                best = (x, b, v);
            }
        }
    }

    // shrinking local grid around the incumbent
    let mut dx = amax / na as f64;
    let mut db = if search.fixed_beta.is_some() { 0.0 } else { (0.0 - beta_lo) / (nb - 1) as f64 };
    for _ in 0..search.refine_rounds {
        let (cx, cb, _) = best;
        for i in -5i32..=5 {
            let x = cx + dx * f64::from(i) / 5.0;
            if !(x > 0.0 && x <= amax) {
                continue;
            }
            for j in -5i32..=5 {
                let b = (cb + db * f64::from(j) / 5.0).clamp(beta_lo, 0.0);
                let v = objective(x, b);
                if v < best.2 {
                    best = (x, b, v);
                }
            }
        }
        dx *= 0.5;
        db *= 0.5;
    }
    let (x, b, p) = best;
    Ok(TwoModeOptimum { alpha_over_pi: x, beta: b + m1 as f64, p })
}

/// Curves of the two-mode minimum over `alpha/pi` for several fluxes:
/// rows `(alpha/pi, beta, p_min)`, beta-major.
pub fn two_mode_curves(m1: u64, m2: u64, alpha_over_pi: &[f64], betas: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::with_capacity(alpha_over_pi.len() * betas.len());
    for &b in betas {
        for &x in alpha_over_pi {
            let params = RingParams::from_alpha_over_pi(x, b)?;
            rows.push((x, b, minimize_two_mode(m1, m2, &params)?.p_min));
        }
    }
    Ok(rows)
}

/// Default flux values for the two-mode curves (a plotting choice).
pub const CURVE_BETAS: [f64; 5] = [0.0, -0.25, -0.5, -0.75, -0.999];
