//! Fast self-check of a build against independent oracles.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringflow_core::kernel::kernel_entry;
use ringflow_core::line::{nystrom_min, LineGrid, C_LINE};
use ringflow_core::twomode::global_two_mode_min;
use ringflow_core::{
    build_kernel, fit_quadratic, integrated_current, min_eigen, minimize_two_mode, time_quadrature_p, two_mode_p,
    Method, ModeAmplitudes, RingConfig, RingParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Outcome = Result<String, String>;
type CheckFn = fn() -> Outcome;

fn within(label: &str, got: f64, want: f64, tol: f64) -> Outcome {
    let err = (got - want).abs();
    if err <= tol {
        Ok(format!("{label} {got:.12} (err {err:.2e})"))
    } else {
        Err(format!("{label} {got:.12}, expected {want:.12} within {tol:e} (err {err:.2e})"))
    }
}

fn jacobi_min(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| a[i][j] * a[i][j]).sum::<f64>()).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + theta.hypot(1.0)) };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                let (upper, lower) = a.split_at_mut(q);
                for (x, y) in upper[p].iter_mut().zip(lower[0].iter_mut()) {
                    (*x, *y) = (c * *x - s * *y, s * *x + c * *y);
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

fn random_state(rng: &mut StdRng, n: usize) -> ModeAmplitudes {
    let params = RingParams::from_alpha_over_pi(rng.random_range(0.05..1.0), -rng.random_range(0.0..0.999)).unwrap();
    let c = (0..=n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ModeAmplitudes::normalized(c, params).unwrap()
}

fn small_kernels_match_jacobi() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let aop = rng.random_range(0.01..2.5);
        let beta = -rng.random_range(0.0..0.999);
        let n = rng.random_range(2..=10);
        let kernel = build_kernel(&RingConfig::from_alpha_over_pi(aop, beta, n).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let rows = (0..=n).map(|i| (0..=n).map(|j| kernel.get(i, j)).collect()).collect();
        let want = jacobi_min(rows);
        for method in [Method::Dense, Method::Iterative] {
            let got = min_eigen(&kernel, method).map_err(|e| e.to_string())?.lambda_min;
            worst = worst.max((got - want).abs());
        }
    }
    if worst <= 1e-12 {
        Ok(format!("max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:.2e} > 1e-12"))
    }
}

fn kernel_invariances() -> Outcome {
    let mut worst: f64 = 0.0;
    for &(aop, beta) in &[(0.37, -0.3), (0.05, -0.9), (1.7, 0.0)] {
        for m in 0..12 {
            for n in 0..12 {
                let (mf, nf) = (m as f64, n as f64);
                let k = kernel_entry(aop, beta, mf, nf);
                if k.to_bits() != kernel_entry(aop, beta, nf, mf).to_bits() {
                    return Err(format!("asymmetric at ({m},{n})"));
                }
                worst = worst.max((kernel_entry(aop, beta + 1.0, mf + 1.0, nf + 1.0) - k).abs());
            }
        }
    }
    if worst <= 1e-12 {
        Ok(format!("symmetric; shift deviation {worst:.2e}"))
    } else {
        Err(format!("shift deviation {worst:.2e} > 1e-12"))
    }
}

fn integer_alpha_zeros() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=3 {
        let kernel = build_kernel(&RingConfig::from_alpha_over_pi(k as f64, 0.0, 60).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        worst = worst.max(min_eigen(&kernel, Method::Dense).map_err(|e| e.to_string())?.lambda_min.abs());
    }
    if worst <= 1e-10 {
        Ok(format!("max |lambda| {worst:.2e}"))
    } else {
        Err(format!("max |lambda| {worst:.2e} > 1e-10"))
    }
}

fn published_truncation() -> Outcome {
    let cfg = RingConfig::from_alpha_over_pi(0.3703965, 0.0, 800).map_err(|e| e.to_string())?;
    let r = min_eigen(&build_kernel(&cfg).map_err(|e| e.to_string())?, Method::Dense).map_err(|e| e.to_string())?;
    within("lambda(800)", r.lambda_min, -0.11681560946, 1e-9)
}

fn exact_quadratic_fit() -> Outcome {
    let pts: Vec<(usize, f64)> = [300usize, 450, 700, 1000, 1500]
        .iter()
        .map(|&n| {
            let x = 1.0 / n as f64;
            (n, -0.1168 + 0.02 * x - 3.0 * x * x)
        })
        .collect();
    let fit = fit_quadratic(&pts).map_err(|e| e.to_string())?;
    within("a0", fit.a0, -0.1168, 1e-13)
}

fn two_mode_closed_form() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let params = RingParams::from_alpha_over_pi(rng.random_range(0.05..2.0), -rng.random_range(0.0..0.999))
            .map_err(|e| e.to_string())?;
        let (m1, m2) = (0, rng.random_range(1..5));
        let best = minimize_two_mode(m1, m2, &params).map_err(|e| e.to_string())?.p_min;
        for _ in 0..20 {
            let p = two_mode_p(m1, m2, &params, rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
                .map_err(|e| e.to_string())?;
            if p < best - 1e-12 {
                return Err(format!("random draw {p} beats closed form {best}"));
            }
        }
    }
    let g = global_two_mode_min(0, 1).map_err(|e| e.to_string())?;
    within("global two-mode minimum", g.p, -0.101727, 1e-5)
}

fn current_quadrature() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let n = rng.random_range(1..=8);
        let state = random_state(&mut rng, n);
        let cfg = RingConfig::from_params(*state.params(), n).map_err(|e| e.to_string())?;
        let kernel = build_kernel(&cfg).map_err(|e| e.to_string())?;
        let form = integrated_current(&state, &kernel).map_err(|e| e.to_string())?;
        let quad = time_quadrature_p(&state, 16385).map_err(|e| e.to_string())?;
        worst = worst.max((form - quad).abs());
    }
    if worst <= 1e-8 {
        Ok(format!("max |form - quadrature| {worst:.2e}"))
    } else {
        Err(format!("max |form - quadrature| {worst:.2e} > 1e-8"))
    }
}

fn line_bound() -> Outcome {
    let lambda =
        nystrom_min(&LineGrid::new(5.0, 250).map_err(|e| e.to_string())?, Method::Dense).map_err(|e| e.to_string())?;
    if (-C_LINE - 1e-4..0.0).contains(&lambda) {
        Ok(format!("lambda(u_max=5) {lambda:.7} in [-c_line, 0)"))
    } else {
        Err(format!("lambda(u_max=5) {lambda:.7} outside [-c_line - 1e-4, 0)"))
    }
}

/// Runs every check; none short-circuits the others.
pub fn run_all() -> Vec<Check> {
    let checks: [(&'static str, CheckFn); 8] = [
        ("small kernels match Jacobi", small_kernels_match_jacobi),
        ("kernel symmetry and flux shift", kernel_invariances),
        ("zero bound at alpha = k pi", integer_alpha_zeros),
        ("published N = 800 eigenvalue", published_truncation),
        ("quadratic fit recovers a0", exact_quadratic_fit),
        ("two-mode closed form", two_mode_closed_form),
        ("current quadrature matches kernel", current_quadrature),
        ("line kernel within bound", line_bound),
    ];
    checks
        .iter()
        .map(|&(name, f)| {
            let start = Instant::now();
            let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok(detail) => Check { name, passed: true, detail, seconds },
                Err(detail) => Check { name, passed: false, detail, seconds },
            }
        })
        .collect()
}
