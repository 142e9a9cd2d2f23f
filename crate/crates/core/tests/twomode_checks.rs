use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ringflow_core::line::C_LINE;
use ringflow_core::twomode::{global_two_mode_min, global_two_mode_min_with, TwoModeSearch};
use ringflow_core::{minimize_two_mode, two_mode_p, RingParams};

fn random_case(rng: &mut StdRng) -> (u64, u64, RingParams) {
    let m1 = rng.random_range(0..6u64);
    let m2 = m1 + rng.random_range(1..6u64);
    let aop = rng.random_range(0.01..2.0);
    // raw flux with m1 admissible: ceil(beta) <= m1
    let beta = m1 as f64 - rng.random_range(0.0..0.999);
    (m1, m2, RingParams::from_alpha_over_pi(aop, beta).unwrap())
}

#[test]
fn closed_form_beats_random_angles() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..10 {
        let (m1, m2, params) = random_case(&mut rng);
        let best = minimize_two_mode(m1, m2, &params).unwrap();
        let at_star = two_mode_p(m1, m2, &params, best.phi_star, best.gamma_star).unwrap();
        assert!((at_star - best.p_min).abs() <= 1e-12, "{at_star} vs {}", best.p_min);
        for _ in 0..10_000 {
            let phi = rng.random_range(0.0..=PI);
            let gamma = rng.random_range(0.0..2.0 * PI);
            let p = two_mode_p(m1, m2, &params, phi, gamma).unwrap();
            assert!(best.p_min <= p + 1e-12);
        }
    }
}

#[test]
fn brute_force_grid_never_beats_closed_form() {
    let mut rng = StdRng::seed_from_u64(32);
    let dphi = PI / 720.0;
    for _ in 0..4 {
        let (m1, m2, params) = random_case(&mut rng);
        let best = minimize_two_mode(m1, m2, &params).unwrap();
        let mut grid_min = f64::INFINITY;
        for i in 0..=720 {
            for j in 0..720 {
                let p = two_mode_p(m1, m2, &params, dphi * i as f64, 2.0 * dphi * j as f64).unwrap();
                grid_min = grid_min.min(p);
            }
        }
        let curvature = params.alpha_over_pi() * best.b_val.hypot(best.a_val);
        assert!(grid_min >= best.p_min - 1e-12);
        assert!(grid_min - best.p_min <= curvature * dphi * dphi, "{grid_min} vs {}", best.p_min);
    }
}

#[test]
fn index_gap_scaling() {
    let mut rng = StdRng::seed_from_u64(33);
    for _ in 0..100 {
        let (m1, m2, params) = random_case(&mut rng);
        let gap = (m2 - m1) as f64;
        let reduced = RingParams::new(params.alpha() * gap * gap, (params.beta_raw() - m1 as f64) / gap).unwrap();
        let lhs = minimize_two_mode(m1, m2, &params).unwrap().p_min;
        let rhs = minimize_two_mode(0, 1, &reduced).unwrap().p_min / gap;
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300), "{lhs} vs {rhs}");

        let phi = rng.random_range(0.0..=PI);
        let gamma = rng.random_range(0.0..2.0 * PI);
        let lhs = two_mode_p(m1, m2, &params, phi, gamma).unwrap();
        let rhs = two_mode_p(0, 1, &reduced, phi, gamma).unwrap() / gap;
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300), "{lhs} vs {rhs}");
    }
}

#[test]
fn global_minimum_of_lowest_pair() {
    let opt = global_two_mode_min(0, 1).unwrap();
    assert!((opt.p - -0.101727).abs() <= 1e-5, "{}", opt.p);
    assert!((opt.p / -C_LINE - 2.6).abs() < 0.05);
    assert!(opt.beta > -1.0 && opt.beta <= 0.0);
}

#[test]
fn global_minimum_scales_with_gap() {
    let base = global_two_mode_min(0, 1).unwrap().p;
    for (m1, m2) in [(0, 2), (1, 3), (2, 5), (4, 5), (0, 7)] {
        let opt = global_two_mode_min(m1, m2).unwrap();
        assert!((opt.p - base / (m2 - m1) as f64).abs() <= 1e-6, "({m1}, {m2}): {}", opt.p);
    }
}

#[test]
fn half_flux_slice_matches_dense_scan() {
    let search = TwoModeSearch { fixed_beta: Some(-0.5), ..TwoModeSearch::default() };
    let opt = global_two_mode_min_with(0, 1, &search).unwrap();
    assert_eq!(opt.beta, -0.5);

    let mut scan = f64::INFINITY;
    for i in 1..=20_000 {
        let params = RingParams::from_alpha_over_pi(i as f64 * 1e-4, -0.5).unwrap();
        scan = scan.min(minimize_two_mode(0, 1, &params).unwrap().p_min);
    }
    assert!(opt.p <= scan + 1e-12);
    assert!(scan - opt.p <= 1e-6, "refined {} scan {scan}", opt.p);
}

#[test]
fn rejects_bad_indices_and_angles() {
    let params = RingParams::from_alpha_over_pi(1.0, 0.0).unwrap();
    assert!(minimize_two_mode(1, 1, &params).is_err());
    assert!(two_mode_p(0, 1, &params, -0.1, 0.0).is_err());
    assert!(two_mode_p(0, 1, &params, 0.0, 2.0 * PI).is_err());
    let shifted = RingParams::from_alpha_over_pi(1.0, 2.5).unwrap();
    assert!(minimize_two_mode(2, 4, &shifted).is_err());
}
