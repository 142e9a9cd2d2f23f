mod common;

use std::f64::consts::PI;

use common::{current_double_sum, random_state};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringflow_core::state::tau_grid;
use ringflow_core::{
    build_kernel, current_series, integrated_current, minimize_two_mode, time_quadrature_p, ModeAmplitudes, RingConfig,
    RingParams,
};

#[test]
fn window_quadrature_reproduces_quadratic_form() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let state = random_state(&mut rng, 16);
        let cfg = RingConfig::from_params(*state.params(), state.n_trunc()).unwrap();
        let exact = integrated_current(&state, &build_kernel(&cfg).unwrap()).unwrap();
        let quad = time_quadrature_p(&state, 65_537).unwrap();
        assert!((exact - quad).abs() <= 1e-8, "exact {exact} quadrature {quad}");
    }
}

#[test]
fn reduced_current_matches_double_sum() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..50 {
        let state = random_state(&mut rng, 12);
        for _ in 0..100 {
            let theta = rng.random_range(0.0..2.0 * PI);
            let tau = rng.random_range(-1.5..1.5);
            let fast = state.current_at(theta, tau);
            let slow = current_double_sum(&state, theta, tau);
            assert!((fast - slow).abs() <= 1e-13, "{fast} vs {slow} at ({theta}, {tau})");
        }
    }
}

#[test]
fn density_integrates_to_one() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..10 {
        let state = random_state(&mut rng, 10);
        let tau = rng.random_range(-1.0..1.0);
        // periodic trapezoid is exact for trigonometric polynomials of low degree
        let k = 64;
        let total: f64 =
            (0..k).map(|j| state.density_at(2.0 * PI * j as f64 / k as f64, tau)).sum::<f64>() * (2.0 * PI / k as f64);
        assert!((total - 1.0).abs() <= 1e-13, "{total}");
    }
}

#[test]
fn continuity_holds_under_step_refinement() {
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..10 {
        let state = random_state(&mut rng, 6);
        let theta = rng.random_range(0.0..2.0 * PI);
        let tau = rng.random_range(-0.5..0.5);
        let defect = |h: f64| {
            let dt = (state.density_at(theta, tau + h) - state.density_at(theta, tau - h)) / (2.0 * h);
            let dj = (state.current_at(theta + h, tau) - state.current_at(theta - h, tau)) / (2.0 * h);
            (dt + dj).abs()
        };
        let (coarse, fine) = (defect(1e-3), defect(5e-4));
        // second order: halving h cuts the defect by about four
        assert!(fine < 0.3 * coarse || fine < 1e-9, "coarse {coarse} fine {fine}");
    }
}

#[test]
fn simpson_converges_at_fourth_order() {
    let params = RingParams::from_alpha_over_pi(0.2, -0.4).unwrap();
    let state = ModeAmplitudes::from_real(&[0.8, -0.5, 0.3], params).unwrap();
    let cfg = RingConfig::from_params(params, 2).unwrap();
    let exact = integrated_current(&state, &build_kernel(&cfg).unwrap()).unwrap();
    let errors: Vec<f64> =
        [65, 129, 257, 513].iter().map(|&n| (time_quadrature_p(&state, n).unwrap() - exact).abs()).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() < 0.3, "observed order {order} from {errors:?}");
    }
}

#[test]
fn series_window_and_simpson_agree_with_quadrature() {
    let mut rng = StdRng::seed_from_u64(15);
    let state = random_state(&mut rng, 8);
    let series = current_series(&state, 0.0, (-0.5, 0.5), 4097).unwrap();
    let direct = time_quadrature_p(&state, 4097).unwrap();
    assert_eq!(series.simpson().unwrap(), direct);
    assert_eq!(series.tau_samples, tau_grid((-0.5, 0.5), 4097).unwrap());
    assert_eq!(series.window(-0.25, 0.25).count(), 2049);
}

#[test]
fn eight_mode_state_quadrature() {
    let params = RingParams::from_alpha_over_pi(0.37, -0.3).unwrap();
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..5 {
        let c: Vec<Complex64> =
            (0..8).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let state = ModeAmplitudes::normalized(c, params).unwrap();
        let kernel = build_kernel(&RingConfig::from_params(params, 7).unwrap()).unwrap();
        let exact = integrated_current(&state, &kernel).unwrap();
        let quad = time_quadrature_p(&state, 16_385).unwrap();
        assert!((exact - quad).abs() <= 1e-8, "exact {exact} quadrature {quad}");
    }
}

#[test]
fn two_mode_optimum_state_quadrature() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..20 {
        let params =
            RingParams::from_alpha_over_pi(rng.random_range(0.05..1.5), -rng.random_range(0.0..0.999)).unwrap();
        let m2 = rng.random_range(1..6u64);
        let r = minimize_two_mode(0, m2, &params).unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); m2 as usize + 1];
        c[0] = Complex64::new((r.phi_star / 2.0).cos(), 0.0);
        c[m2 as usize] = Complex64::from_polar((r.phi_star / 2.0).sin(), r.gamma_star);
        let state = ModeAmplitudes::normalized(c, params).unwrap();
        let quad = time_quadrature_p(&state, 65_537).unwrap();
        assert!((quad - r.p_min).abs() <= 1e-8, "quadrature {quad} closed form {}", r.p_min);
    }
}
