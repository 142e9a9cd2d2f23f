use ringflow_core::{build_kernel, integrated_current, maximizing_state, mean_energy, Method, RingConfig};

const ALPHA_OVER_PI: f64 = 0.3703965;

#[test]
fn maximizing_state_at_2000_reproduces_its_eigenvalue() {
    let cfg = RingConfig::from_alpha_over_pi(ALPHA_OVER_PI, 0.0, 2000).unwrap();
    let ms = maximizing_state(&cfg, Method::Dense).unwrap();
    let p = integrated_current(&ms.state, &build_kernel(&cfg).unwrap()).unwrap();
    assert!((p + 0.11681564340085021).abs() <= 1e-9, "{p}");
    assert!((p - ms.eigen.lambda_min).abs() <= 1e-12);
    let c = ms.state.coeffs();
    let c0 = c[0].norm();
    assert!(c.iter().enumerate().skip(1).all(|(m, cm)| cm.norm() < c0 / (m * m) as f64));
}

#[test]
fn mean_energy_is_stable_in_truncation() {
    let energy = |n: usize| {
        let cfg = RingConfig::from_alpha_over_pi(ALPHA_OVER_PI, 0.0, n).unwrap();
        mean_energy(&maximizing_state(&cfg, Method::Auto).unwrap().state)
    };
    let (e2000, e3000) = (energy(2000), energy(3000));
    assert!((e2000 - 0.3855).abs() <= 2e-3, "{e2000}");
    assert!((e3000 - e2000).abs() <= 1e-4, "{e2000} -> {e3000}");
}
