//! Inversion round-trip and summability invariants, checked against the
//! exact-rational shadow recursion.

mod common;

use common::{cnp_families, rational_a, rational_b, rational_to_f64, ready_table};
use proptest::prelude::*;
use uikernels::kernel::{
    classify_summability, compute_a, invert_series, is_cnp, KernelFamily, KernelSpec,
};

#[test]
fn float_recursion_matches_rational_oracle() {
    for family in [
        KernelFamily::Hardy,
        KernelFamily::BergmanDisc,
        KernelFamily::HS { s: -1.0 },
        KernelFamily::HS { s: -2.0 },
        KernelFamily::BesovSobolev { sigma: 0.5 },
        KernelFamily::BesovSobolev { sigma: 0.25 },
    ] {
        let n_max = 100;
        let a_exact: Vec<_> = (0..=n_max)
            .map(|n| rational_a(&family, n).expect("rational family"))
            .collect();
        let b_exact = rational_b(&a_exact);
        let table = ready_table(family.clone(), 1, n_max);
        for m in 1..=n_max {
            let exact = rational_to_f64(&b_exact[m - 1]);
            let float = table.b(m).unwrap();
            assert!(
                (float - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "{:?} b_{}: float {} vs exact {}",
                family,
                m,
                float,
                exact
            );
        }
    }
}

#[test]
fn dirichlet_early_values_are_exact() {
    let b = rational_b(&(0..=5).map(|n| common::ratio(1, n + 1)).collect::<Vec<_>>());
    assert_eq!(b[0], common::ratio(1, 2));
    assert_eq!(b[1], common::ratio(1, 12));
    assert_eq!(b[2], common::ratio(1, 24));
    assert_eq!(b[3], common::ratio(19, 720));
}

#[test]
fn besov_sigma_one_equals_hardy_exactly() {
    let besov = compute_a(
        &KernelSpec::new(KernelFamily::BesovSobolev { sigma: 1.0 }, 1).unwrap(),
        200,
    )
    .unwrap();
    let hardy = compute_a(&KernelSpec::new(KernelFamily::Hardy, 1).unwrap(), 200).unwrap();
    assert_eq!(besov.a_slice(), hardy.a_slice());
}

#[test]
fn cnp_partial_sums_nondecreasing_and_bounded() {
    for family in cnp_families() {
        let table = ready_table(family.clone(), 1, 400);
        assert!(
            is_cnp(&table, 1e-12).unwrap().passed(),
            "{:?} should be CNP",
            family
        );
        let b = table.b_slice().unwrap();
        let mut partial = 0.0;
        for &x in b {
            let next = partial + x;
            assert!(next + 1e-12 >= partial);
            partial = next;
        }
        assert!(partial <= 1.0 + 1e-12, "{:?} sum {}", family, partial);
        let report = classify_summability(&table, 1e-12).unwrap();
        assert!(report.b_sum_within_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_round_trip(
        family_idx in 0usize..8,
        n_max in 1usize..=500,
    ) {
        let family = cnp_families()[family_idx].clone();
        let table = ready_table(family, 1, n_max);
        prop_assert!(table.convolution_residual().unwrap() <= 1e-12);
    }

    #[test]
    fn bergman_round_trip(n_max in 1usize..=500) {
        let table = ready_table(KernelFamily::BergmanDisc, 1, n_max);
        prop_assert!(table.convolution_residual().unwrap() <= 1e-12);
    }

    #[test]
    fn custom_sequences_round_trip_backward_stably(
        coeffs in proptest::collection::vec(0.05f64..20.0, 1..60),
    ) {
        // For adversarial sequences |b_n| can grow geometrically, so the
        // meaningful round-trip statement is relative to the magnitude of
        // the convolution being formed, not to |a_m|.
        let mut with_unit = vec![1.0];
        with_unit.extend(coeffs);
        let n_max = with_unit.len() - 1;
        let spec = KernelSpec::new(
            KernelFamily::Custom { coefficients: with_unit, unnormalized: false },
            1,
        ).unwrap();
        let table = invert_series(&compute_a(&spec, n_max).unwrap()).unwrap();
        let b = table.b_slice().unwrap();
        for m in 1..=n_max {
            let mut sum = 0.0;
            let mut mag = table.a(m).abs();
            for n in 1..=m {
                sum += b[n - 1] * table.a(m - n);
                mag += (b[n - 1] * table.a(m - n)).abs();
            }
            prop_assert!((sum - table.a(m)).abs() <= 1e-12 * mag * (m as f64));
        }
    }
}
