use ringflow_core::sweep::{find_infimum, sweep_alpha, InfimumSearch, Sequential};
use ringflow_core::{extrapolated_infimum, Method, RingParams};

const CHEAP: [usize; 4] = [100, 150, 200, 300];

fn evaluator() -> Sequential {
    Sequential { method: Method::Dense }
}

#[test]
fn sweep_vanishes_at_integer_multiples_of_pi() {
    let out = sweep_alpha(0.0, &[1.0, 2.0, 3.0], &CHEAP, &evaluator()).unwrap();
    for (k, rec) in out.iter().enumerate() {
        let rec = rec.as_ref().unwrap();
        assert_eq!(rec.alpha_over_pi, (k + 1) as f64);
        assert!(rec.p_estimate.abs() <= 1e-10, "{rec:?}");
    }
}

#[test]
fn flux_near_minus_one_weakens_backflow() {
    let near_zero = sweep_alpha(0.0, &[0.37], &CHEAP, &evaluator()).unwrap();
    let near_one = sweep_alpha(-0.999, &[0.37], &CHEAP, &evaluator()).unwrap();
    let (a, b) = (near_zero[0].as_ref().unwrap(), near_one[0].as_ref().unwrap());
    assert!(b.p_estimate > a.p_estimate, "{} vs {}", b.p_estimate, a.p_estimate);
}

#[test]
fn staged_search_finds_ring_optimum() {
    let search = InfimumSearch { schedule: CHEAP.to_vec(), ..InfimumSearch::new((0.3, 0.45), (-0.05, 0.0), 2000) };
    let r = find_infimum(&search, &evaluator()).unwrap();
    assert!(!r.budget_exhausted);
    assert!((r.alpha_over_pi - 0.37040).abs() <= 5e-4, "{r:?}");
    assert!((r.p - -0.116816).abs() <= 1e-5, "{r:?}");
    assert_eq!(r.beta, 0.0);
    assert!(r.stages.last().unwrap().alpha_step < 1e-4);
    for w in r.stages.windows(2) {
        assert!(w[1].p <= w[0].p + 1e-7);
    }

    let again =
        extrapolated_infimum(&RingParams::from_alpha_over_pi(r.alpha_over_pi, r.beta).unwrap(), &CHEAP, Method::Dense)
            .unwrap();
    assert!((again.p - r.p).abs() <= 1e-12);
}

#[test]
fn search_avoids_zero_at_pi() {
    let search = InfimumSearch { schedule: CHEAP.to_vec(), ..InfimumSearch::new((0.9, 1.1), (0.0, 0.0), 500) };
    let r = find_infimum(&search, &evaluator()).unwrap();
    assert!(r.p < 0.0);
    assert!((r.alpha_over_pi - 1.0).abs() > 1e-9);
}

#[test]
fn single_point_box_is_that_point() {
    let search = InfimumSearch { schedule: CHEAP.to_vec(), ..InfimumSearch::new((0.5, 0.5), (-0.25, -0.25), 10) };
    let r = find_infimum(&search, &evaluator()).unwrap();
    let direct =
        extrapolated_infimum(&RingParams::from_alpha_over_pi(0.5, -0.25).unwrap(), &CHEAP, Method::Dense).unwrap();
    assert_eq!(r.evaluations, 1);
    assert_eq!(r.p, direct.p);
}
