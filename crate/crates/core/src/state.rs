//! States built from nonnegative-kinetic-momentum modes, their time-resolved
//! probability current, and the mean energy.
//!
//! Units are dimensionless throughout: time is `tau = t / T`, the current is
//! reported as `T J`, and mode `m` accumulates the phase
//! `E_m t / hbar = 2 alpha (m - beta)^2 tau`.

use core::f64::consts::PI;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::eigen::{min_eigen, EigenResult, Method};
use crate::error::{finite, Error, Result};
use crate::kernel::{build_kernel, RingConfig, RingParams};
use crate::math::KahanSum;

/// Normalization tolerance enforced on construction.
pub const STATE_NORM_TOLERANCE: f64 = 1e-10;
const PHASE_TOLERANCE: f64 = 1e-12;

/// Normalized amplitudes `c_0..c_N` over canonical modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    coeffs: Vec<Complex64>,
    params: RingParams,
}

impl ModeAmplitudes {
    /// Takes coefficients that are already normalized (within
    /// `STATE_NORM_TOLERANCE`) and applies the phase convention: the first
    /// coefficient with magnitude above 1e-12 becomes real and positive.
    pub fn new(coeffs: Vec<Complex64>, params: RingParams) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("state needs at least one mode"));
        }
        for c in &coeffs {
            finite("coefficient", c.re)?;
            finite("coefficient", c.im)?;
        }
        let norm_sq = norm_sq(&coeffs);
        if norm_sq.is_nan() || (norm_sq - 1.0).abs() > STATE_NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        let mut s = Self { coeffs, params };
        s.renormalize();
        s.fix_phase();
        Ok(s)
    }

    /// Scales arbitrary nonzero coefficients to unit norm.
    pub fn normalized(mut coeffs: Vec<Complex64>, params: RingParams) -> Result<Self> {
        let n = libm::sqrt(norm_sq(&coeffs));
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalized { norm_sq: n * n });
        }
        coeffs.iter_mut().for_each(|c| *c /= n);
        Self::new(coeffs, params)
    }

    /// Real coefficients, scaled to unit norm.
    pub fn from_real(values: &[f64], params: RingParams) -> Result<Self> {
        Self::normalized(values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), params)
    }

    /// `c_m = delta_{m, mode}` over `0..=n_trunc`.
    pub fn single_mode(mode: usize, n_trunc: usize, params: RingParams) -> Result<Self> {
        if mode > n_trunc {
            return Err(Error::InvalidParameter("mode index beyond truncation"));
        }
        let mut c = alloc::vec![Complex64::new(0.0, 0.0); n_trunc + 1];
        c[mode] = Complex64::new(1.0, 0.0);
        Self::new(c, params)
    }

    fn renormalize(&mut self) {
        let n = libm::sqrt(norm_sq(&self.coeffs));
        self.coeffs.iter_mut().for_each(|c| *c /= n);
    }

    fn fix_phase(&mut self) {
        if let Some(k) = self.coeffs.iter().position(|c| c.norm() > PHASE_TOLERANCE) {
            let c = self.coeffs[k];
            let rot = c.conj() / c.norm();
            self.coeffs.iter_mut().for_each(|v| *v *= rot);
            self.coeffs[k] = Complex64::new(c.norm(), 0.0);
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn n_trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.coeffs)
    }

    /// `z = sum c_m e^{i m theta} e^{-i phase_m}` and
    /// `w = sum (m - beta) c_m e^{i m theta} e^{-i phase_m}`.
    fn sums(&self, theta: f64, tau: f64) -> (Complex64, Complex64) {
        let beta = self.params.beta();
        let two_alpha = 2.0 * self.params.alpha();
        let mut z = Complex64::new(0.0, 0.0);
        let mut w = Complex64::new(0.0, 0.0);
        for (m, c) in self.coeffs.iter().enumerate() {
            let k = m as f64 - beta;
            let angle = m as f64 * theta - two_alpha * k * k * tau;
            let (s, co) = libm::sincos(angle);
            let a = c * Complex64::new(co, s);
            z += a;
            w += a * k;
        }
        (z, w)
    }

    /// `T J(theta, tau)`.
    pub fn current_at(&self, theta: f64, tau: f64) -> f64 {
        let (z, w) = self.sums(theta, tau);
        2.0 * self.params.alpha() / PI * (z.conj() * w).re
    }

    /// Probability density `|Psi(theta, tau)|^2`.
    pub fn density_at(&self, theta: f64, tau: f64) -> f64 {
        let (z, _) = self.sums(theta, tau);
        z.norm_sqr() / (2.0 * PI)
    }
}

fn norm_sq(c: &[Complex64]) -> f64 {
    c.iter().map(|v| v.norm_sqr()).collect::<KahanSum>().value()
}

/// Minimizing state of a truncated kernel with its eigen-solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizingState {
    pub state: ModeAmplitudes,
    pub eigen: EigenResult,
}

/// The state that makes the integrated current most negative at this
/// truncation: the smallest-eigenvalue eigenvector, real coefficients.
pub fn maximizing_state(config: &RingConfig, method: Method) -> Result<MaximizingState> {
    let kernel = build_kernel(config)?;
    let eigen = min_eigen(&kernel, method)?;
    let state = ModeAmplitudes::from_real(&eigen.eigenvector, *config.params())?;
    Ok(MaximizingState { state, eigen })
}

/// `<E> T / hbar = 2 alpha sum |c_m|^2 (m - beta)^2`.
pub fn mean_energy(state: &ModeAmplitudes) -> f64 {
    let beta = state.params.beta();
    let s: KahanSum = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| {
            let k = m as f64 - beta;
            c.norm_sqr() * k * k
        })
        .collect();
    2.0 * state.params.alpha() * s.value()
}

/// Samples of `T J(theta, tau)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSeries {
    pub theta: f64,
    pub tau_samples: Vec<f64>,
    pub tj_values: Vec<f64>,
}

impl CurrentSeries {
    /// Trapezoid rule over the sampled range.
    pub fn trapezoid(&self) -> f64 {
        let mut acc = KahanSum::new();
        for k in 1..self.tau_samples.len() {
            let h = self.tau_samples[k] - self.tau_samples[k - 1];
            acc += 0.5 * h * (self.tj_values[k] + self.tj_values[k - 1]);
        }
        acc.value()
    }

    /// Composite Simpson over the sampled range; needs an odd sample count.
    pub fn simpson(&self) -> Result<f64> {
        let n = self.tau_samples.len();
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter("Simpson needs an odd sample count >= 3"));
        }
        let h = (self.tau_samples[n - 1] - self.tau_samples[0]) / (n - 1) as f64;
        let mut acc = KahanSum::new();
        for (k, v) in self.tj_values.iter().enumerate() {
            let w = if k == 0 || k == n - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * v;
        }
        Ok(acc.value() * h / 3.0)
    }

    /// Samples with `tau` in the closed window `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.tau_samples.iter().copied().zip(self.tj_values.iter().copied()).filter(move |(t, _)| *t >= lo && *t <= hi)
    }
}

/// Uniform samples `tau_k = lo + k (hi - lo) / (n - 1)`.
pub fn tau_grid(range: (f64, f64), n_samples: usize) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    finite("tau", lo)?;
    finite("tau", hi)?;
    if hi <= lo {
        return Err(Error::InvalidParameter("tau range is empty"));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples"));
    }
    let last = (n_samples - 1) as f64;
    Ok((0..n_samples).map(|k| if k + 1 == n_samples { hi } else { lo + (hi - lo) * (k as f64 / last) }).collect())
}

/// `T J(theta, tau)` over a uniform `tau` grid, O(N) per sample.
pub fn current_series(
    state: &ModeAmplitudes,
    theta: f64,
    tau_range: (f64, f64),
    n_samples: usize,
) -> Result<CurrentSeries> {
    finite("theta", theta)?;
    let tau_samples = tau_grid(tau_range, n_samples)?;
    let tj_values = tau_samples.iter().map(|&t| state.current_at(theta, t)).collect();
    Ok(CurrentSeries { theta, tau_samples, tj_values })
}

/// Integrated current at `theta = 0` over `tau` in `[-1/2, 1/2]` by
/// composite Simpson on `n_samples` (odd) points. Independent of the kernel.
pub fn time_quadrature_p(state: &ModeAmplitudes, n_samples: usize) -> Result<f64> {
    if n_samples < 3 || n_samples % 2 == 0 {
        return Err(Error::InvalidParameter("n_samples must be odd and at least 3"));
    }
    current_series(state, 0.0, (-0.5, 0.5), n_samples)?.simpson()
}
