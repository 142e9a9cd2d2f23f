//! Oracles shared by the integration tests. None of them call the code path
//! they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;
use ringflow_core::{ModeAmplitudes, RingParams};

pub fn random_state(rng: &mut StdRng, max_n: usize) -> ModeAmplitudes {
    let aop = rng.random_range(0.05..1.0);
    let beta = -rng.random_range(0.0..0.999);
    let n = rng.random_range(1..=max_n);
    let c: Vec<Complex64> =
        (0..=n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ModeAmplitudes::normalized(c, RingParams::from_alpha_over_pi(aop, beta).unwrap()).unwrap()
}

/// `T J` straight from the mode expansion, O(N^2), with per-mode factors
/// `psi_n(theta) e^{-i E_n t}`.
pub fn current_double_sum(state: &ModeAmplitudes, theta: f64, tau: f64) -> f64 {
    let p = state.params();
    let (alpha, beta) = (p.alpha(), p.beta());
    let c = state.coeffs();
    let factor = |m: usize| {
        let k = m as f64 - beta;
        Complex64::from_polar(1.0, m as f64 * theta - 2.0 * alpha * k * k * tau)
    };
    let mut total = Complex64::new(0.0, 0.0);
    for (m, cm) in c.iter().enumerate() {
        for (n, cn) in c.iter().enumerate() {
            let weight = m as f64 + n as f64 - 2.0 * beta;
            total += (cm * factor(m)).conj() * (cn * factor(n)) * weight;
        }
    }
    alpha / PI * total.re
}

/// `sum_{m,n} conj(c_m) K_mn c_n` with no symmetry or compensation.
pub fn literal_form(c: &[Complex64], entry: impl Fn(usize, usize) -> f64) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (m, cm) in c.iter().enumerate() {
        for (n, cn) in c.iter().enumerate() {
            total += cm.conj() * cn * entry(m, n);
        }
    }
    total.re
}
