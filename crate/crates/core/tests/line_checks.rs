use ringflow_core::line::{line_kernel, nystrom_convergence, nystrom_min, ring_small_alpha_limit, LineGrid, C_LINE};
use ringflow_core::{Method, RingParams};

#[test]
fn grid_nodes_are_midpoints() {
    let g = LineGrid::new(10.0, 2000).unwrap();
    let nodes = g.nodes();
    assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    assert!(nodes[0] > 0.0);
    assert!((g.spacing() * g.n_points() as f64 - g.u_max()).abs() <= 1e-12);
    assert!(LineGrid::new(0.0, 10).is_err());
    assert!(LineGrid::new(10.0, 0).is_err());
}

#[test]
fn line_kernel_is_symmetric_with_simple_diagonal() {
    let g = LineGrid::new(5.0, 300).unwrap();
    let a = line_kernel(&g).unwrap();
    for i in 0..g.n_points() {
        let u = g.node(i);
        assert_eq!(a.get(i, i), g.spacing() / std::f64::consts::PI * 2.0 * u);
        for j in 0..i {
            assert_eq!(a.get(i, j).to_bits(), a.get(j, i).to_bits());
        }
    }
}

#[test]
fn nystrom_converges_under_joint_doubling() {
    let start = LineGrid::new(2.5, 250).unwrap();
    let rows = nystrom_convergence(&start, 3, Method::Dense).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[3].0, rows[3].1), (20.0, 2000));
    let steps: Vec<f64> = rows.windows(2).map(|w| (w[1].2 - w[0].2).abs()).collect();
    assert!(steps.windows(2).all(|s| s[1] < s[0]), "{rows:?}");
    // a truncated domain only ever raises the minimum
    assert!(rows.windows(2).all(|w| w[1].2 < w[0].2));
    assert!(rows.iter().all(|r| r.2 > -C_LINE - 1e-4));
    assert!((rows[3].2 + C_LINE).abs() < 3e-3);
}

#[test]
fn ring_route_approaches_line_bound() {
    let params = RingParams::new(1e-3, 0.0).unwrap();
    let limit = ring_small_alpha_limit(&params, 1000, Method::Auto).unwrap();
    assert!(!limit.undercovered);
    assert!((limit.u_coverage - 1000.0 * 1e-3f64.sqrt()).abs() < 1e-9);
    assert!((limit.lambda_min + C_LINE).abs() <= 1e-3, "{}", limit.lambda_min);
}

#[test]
fn ring_and_nystrom_agree_at_matched_coverage() {
    // u = m sqrt(alpha): both discretizations cover [0, 20]
    let ring = ring_small_alpha_limit(&RingParams::new(1e-4, 0.0).unwrap(), 2000, Method::Dense).unwrap();
    let line = nystrom_min(&LineGrid::new(20.0, 2000).unwrap(), Method::Dense).unwrap();
    assert!((ring.lambda_min - line).abs() <= 2e-3, "ring {} line {line}", ring.lambda_min);
}

#[test]
fn flux_dependence_fades_as_alpha_shrinks() {
    let spread = |alpha: f64| {
        let at = |beta: f64| {
            ring_small_alpha_limit(&RingParams::new(alpha, beta).unwrap(), 1000, Method::Dense).unwrap().lambda_min
        };
        (at(0.0) - at(-0.5)).abs()
    };
    let spreads: Vec<f64> = [1e-3, 3e-4, 1e-4].into_iter().map(spread).collect();
    assert!(spreads.windows(2).all(|w| w[1] < w[0]), "{spreads:?}");
}

#[test]
fn ring_route_flags_short_coverage() {
    let params = RingParams::new(1e-3, 0.0).unwrap();
    let limit = ring_small_alpha_limit(&params, 100, Method::Dense).unwrap();
    assert!(limit.undercovered);
}

#[test]
fn ring_route_far_from_limit_at_pi() {
    let params = RingParams::new(std::f64::consts::PI, 0.0).unwrap();
    let limit = ring_small_alpha_limit(&params, 50, Method::Dense).unwrap();
    assert!(limit.lambda_min.abs() <= 1e-12);
}
