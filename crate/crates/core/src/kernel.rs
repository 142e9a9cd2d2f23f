//! The backflow kernel `K_mn(alpha, beta)`: the matrix whose quadratic form
//! with the mode amplitudes gives the probability current through
//! `theta = 0`, integrated over the window `-T/2 < t < T/2`.
//!
//! Parameters are dimensionless. `alpha = hbar T / (4 mu R^2)` is held as
//! `alpha / pi`, which keeps the sinc zeros at `alpha = k pi` exact.
//! The flux `beta` is accepted raw and canonicalized into `(-1, 0]`; the
//! integer shift is kept so callers can map mode indices back.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{finite, Error, Result};
use crate::linalg::SymMatrix;
use crate::math::{sinc_pi, KahanSum};
use crate::state::ModeAmplitudes;

/// Tolerance on `sum |c_m|^2 - 1` accepted by the quadratic form.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Largest imaginary part tolerated in the (real) quadratic form.
pub const IMAG_TOLERANCE: f64 = 1e-12;

/// Splits a raw flux into `(beta, shift)` with `beta = raw - shift`,
/// `beta` in `(-1, 0]` and `shift = ceil(raw)`.
pub fn canonicalize(beta_raw: f64) -> Result<(f64, i64)> {
    finite("beta", beta_raw)?;
    if beta_raw.abs() > 4_503_599_627_370_496.0 {
        return Err(Error::InvalidParameter("|beta| too large to canonicalize"));
    }
    let shift = libm::ceil(beta_raw);
    let mut beta = beta_raw - shift;
    if beta <= -1.0 {
        // raw - ceil(raw) rounded onto -1; take the closest value inside the range
        beta = -1.0 + f64::EPSILON / 2.0;
    }
    if beta == 0.0 {
        beta = 0.0;
    }
    Ok((beta, shift as i64))
}

/// Problem parameters without a truncation size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    alpha_over_pi: f64,
    beta: f64,
    shift: i64,
}

impl RingParams {
    /// From `alpha` itself and a raw flux.
    pub fn new(alpha: f64, beta_raw: f64) -> Result<Self> {
        finite("alpha", alpha)?;
        Self::from_alpha_over_pi(alpha / PI, beta_raw)
    }

    pub fn from_alpha_over_pi(alpha_over_pi: f64, beta_raw: f64) -> Result<Self> {
        finite("alpha", alpha_over_pi)?;
        if alpha_over_pi <= 0.0 {
            return Err(Error::InvalidParameter("alpha must be positive"));
        }
        let (beta, shift) = canonicalize(beta_raw)?;
        Ok(Self { alpha_over_pi, beta, shift })
    }

    pub fn alpha(&self) -> f64 {
        PI * self.alpha_over_pi
    }

    pub fn alpha_over_pi(&self) -> f64 {
        self.alpha_over_pi
    }

    /// Canonical flux in `(-1, 0]`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `ceil` of the raw flux; raw mode `m` is canonical mode `m - shift`.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// The flux as originally supplied (up to rounding).
    pub fn beta_raw(&self) -> f64 {
        self.beta + self.shift as f64
    }

    pub fn with_truncation(self, n_trunc: usize) -> Result<RingConfig> {
        RingConfig::from_params(self, n_trunc)
    }
}

/// Parameters plus truncation: indices run `m = 0..=n_trunc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingConfig {
    params: RingParams,
    n_trunc: usize,
}

impl RingConfig {
    pub fn new(alpha: f64, beta_raw: f64, n_trunc: usize) -> Result<Self> {
        RingParams::new(alpha, beta_raw)?.with_truncation(n_trunc)
    }

    pub fn from_alpha_over_pi(alpha_over_pi: f64, beta_raw: f64, n_trunc: usize) -> Result<Self> {
        RingParams::from_alpha_over_pi(alpha_over_pi, beta_raw)?.with_truncation(n_trunc)
    }

    pub fn from_params(params: RingParams, n_trunc: usize) -> Result<Self> {
        if n_trunc < 1 {
            return Err(Error::InvalidParameter("n_trunc must be at least 1"));
        }
        Ok(Self { params, n_trunc })
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    /// Matrix dimension, `n_trunc + 1`.
    pub fn dim(&self) -> usize {
        self.n_trunc + 1
    }
}

/// `(alpha/pi)(m + n - 2 beta) sinc[alpha (m + n - 2 beta)(m - n)]` for
/// arbitrary real indices and flux (no canonicalization).
pub fn kernel_entry(alpha_over_pi: f64, beta: f64, m: f64, n: f64) -> f64 {
    let a = m + n - 2.0 * beta;
    let b = m - n;
    alpha_over_pi * a * sinc_pi(alpha_over_pi * a * b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackflowKernel {
    config: RingConfig,
    matrix: SymMatrix,
}

/// Dense kernel over canonical indices `0..=n_trunc`.
pub fn build_kernel(config: &RingConfig) -> Result<BackflowKernel> {
    let p = config.params;
    let matrix =
        SymMatrix::from_upper_fn(config.dim(), |m, n| kernel_entry(p.alpha_over_pi, p.beta, m as f64, n as f64))?;
    Ok(BackflowKernel { config: *config, matrix })
}

impl BackflowKernel {
    pub fn config(&self) -> &RingConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.matrix.get(m, n)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }
}

/// `sum_{m,n} c_m^* K_mn c_n` over a raw coefficient slice, accumulated
/// row by row (m outer, n inner) with compensation.
pub fn quadratic_form(coeffs: &[Complex64], kernel: &BackflowKernel) -> Result<f64> {
    if coeffs.len() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), found: coeffs.len() });
    }
    let norm_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).collect::<KahanSum>().value();
    if norm_sq.is_nan() || (norm_sq - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sq });
    }
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (m, cm) in coeffs.iter().enumerate() {
        let row = kernel.matrix.row(m);
        for (k, cn) in row.iter().zip(coeffs) {
            // conj(c_m) * c_n
            re += k * (cm.re * cn.re + cm.im * cn.im);
            im += k * (cm.re * cn.im - cm.im * cn.re);
        }
    }
    let imag = im.value();
    if imag.abs() > IMAG_TOLERANCE {
        return Err(Error::NotReal { imag });
    }
    Ok(re.value())
}

/// Time-integrated current `P` through `theta = 0` for a state.
pub fn integrated_current(c: &ModeAmplitudes, kernel: &BackflowKernel) -> Result<f64> {
    quadratic_form(c.coeffs(), kernel)
}
