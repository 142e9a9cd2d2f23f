//! Quantum backflow for a charged particle on a ring.
//!
//! A state built only from modes with nonnegative kinetic angular momentum
//! can still carry a negative probability current through a fixed point.
//! The time-integrated current is a quadratic form in the mode amplitudes;
//! this crate builds its kernel, finds the most negative value over
//! normalized states as a smallest-eigenvalue problem, extrapolates in the
//! truncation size, and supplies the closed-form two-mode analysis, the
//! time-resolved current, and the free-line limit.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod eigen;
pub mod error;
pub mod extrap;
pub mod kernel;
pub mod linalg;
pub mod line;
pub mod math;
pub mod state;
pub mod sweep;
pub mod twomode;

pub use eigen::{min_eigen, smallest_eigenpair, EigenResult, Method, SolverKind};
pub use error::{Error, Result};
pub use extrap::{extrapolated_infimum, fit_quadratic, Extrapolated, ExtrapolationFit};
pub use kernel::{build_kernel, canonicalize, integrated_current, BackflowKernel, RingConfig, RingParams};
pub use state::{current_series, maximizing_state, mean_energy, time_quadrature_p, CurrentSeries, ModeAmplitudes};
pub use twomode::{minimize_two_mode, two_mode_p, TwoModeResult};
