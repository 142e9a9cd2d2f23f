mod common;

use common::literal_form;
use num_complex::Complex64;
use proptest::prelude::*;
use ringflow_core::kernel::{kernel_entry, quadratic_form};
use ringflow_core::{build_kernel, integrated_current, ModeAmplitudes, RingConfig, RingParams};

fn state_strategy(max_modes: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max_modes)
        .prop_filter("nonzero", |v| v.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3))
        .prop_map(|v| {
            let c: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
            let n = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            c.into_iter().map(|x| x / n).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_bitwise_symmetric(aop in 1e-3f64..3.0, beta in -0.999f64..=0.0, n in 1usize..48) {
        let k = build_kernel(&RingConfig::from_alpha_over_pi(aop, beta, n).unwrap()).unwrap();
        for i in 0..=n {
            for j in 0..=n {
                prop_assert_eq!(k.get(i, j).to_bits(), k.get(j, i).to_bits());
            }
        }
        let b = k.config().params().beta();
        for i in 0..=n {
            for j in 0..i {
                let (x, y) = (i as f64, j as f64);
                prop_assert_eq!(kernel_entry(aop, b, x, y).to_bits(), kernel_entry(aop, b, y, x).to_bits());
            }
        }
    }

    #[test]
    fn flux_shift_by_one_leaves_current_unchanged(
        aop in 1e-2f64..2.0,
        beta in -0.999f64..=0.0,
        c in state_strategy(20),
    ) {
        let n = c.len() - 1;
        let k = build_kernel(&RingConfig::from_alpha_over_pi(aop, beta, n).unwrap()).unwrap();
        let canonical = quadratic_form(&c, &k).unwrap();

        // uncanonicalized flux, modes relabelled m -> m + 1
        let shifted = literal_form(&c, |m, n| kernel_entry(aop, beta + 1.0, (m + 1) as f64, (n + 1) as f64));
        let scale = canonical.abs().max(1e-300);
        prop_assert!((canonical - shifted).abs() <= 1e-12 * scale.max(1.0),
            "canonical {canonical} shifted {shifted}");

        // the constructor canonicalizes beta + 1 back into (-1, 0]
        let p = RingParams::from_alpha_over_pi(aop, beta + 1.0).unwrap();
        prop_assert_eq!(p.shift(), 1);
        let k1 = build_kernel(&RingConfig::from_params(p, n).unwrap()).unwrap();
        let via_params = quadratic_form(&c, &k1).unwrap();
        prop_assert!((canonical - via_params).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn quadratic_form_matches_literal_double_sum(
        aop in 1e-2f64..2.0,
        beta in -0.999f64..=0.0,
        c in state_strategy(24),
    ) {
        let n = c.len() - 1;
        let k = build_kernel(&RingConfig::from_alpha_over_pi(aop, beta, n).unwrap()).unwrap();
        let fast = quadratic_form(&c, &k).unwrap();
        let slow = literal_form(&c, |m, n| k.get(m, n));
        prop_assert!((fast - slow).abs() <= 1e-13 * (1.0 + slow.abs()) * c.len() as f64);
    }
}

#[test]
fn single_mode_current_is_exact_and_unbounded() {
    let aop = 0.3703965;
    let beta = -0.3;
    let params = RingParams::from_alpha_over_pi(aop, beta).unwrap();
    let mut last = f64::NEG_INFINITY;
    for m1 in [0usize, 10, 100] {
        let k = build_kernel(&RingConfig::from_params(params, m1.max(1)).unwrap()).unwrap();
        let state = ModeAmplitudes::single_mode(m1, m1.max(1), params).unwrap();
        let p = integrated_current(&state, &k).unwrap();
        assert_eq!(p, 2.0 * aop * (m1 as f64 - beta));
        assert!(p > last);
        last = p;
    }
}

#[test]
fn diagonal_kernel_at_integer_multiples_of_pi() {
    for k in 1..=3 {
        let kern = build_kernel(&RingConfig::from_alpha_over_pi(k as f64, 0.0, 30).unwrap()).unwrap();
        for i in 0..=30 {
            for j in 0..=30 {
                if i != j {
                    assert_eq!(kern.get(i, j), 0.0, "({i}, {j}) at k = {k}");
                }
            }
        }
    }
}
