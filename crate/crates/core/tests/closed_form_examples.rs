use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use warped_forms::closed_form::*;
use warped_forms::{Completeness, Error};

#[test]
fn circle_functions() {
    let t = sphere_function_spectrum(1, 4).unwrap();
    let got: Vec<(f64, u64)> = t
        .entries()
        .iter()
        .map(|e| (e.eigenvalue, e.multiplicity))
        .collect();
    assert_eq!(got, vec![(0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2)]);
}

#[test]
fn two_sphere_functions() {
    let t = sphere_function_spectrum(2, 4).unwrap();
    let got: Vec<(f64, u64)> = t
        .entries()
        .iter()
        .map(|e| (e.eigenvalue, e.multiplicity))
        .collect();
    assert_eq!(got, vec![(0.0, 1), (2.0, 3), (6.0, 5), (12.0, 7)]);
}

#[test]
fn rough_shift_is_identity_on_functions() {
    for n in 1..=6 {
        let h = sphere_hodge_spectrum(n, 0, 6).unwrap();
        let r = rough_from_hodge_round(n, 0, &h).unwrap();
        assert_eq!(h.expanded(), r.expanded());
    }
}

#[test]
fn rough_shift_subtracts_weitzenbock_term() {
    let h = sphere_hodge_spectrum(4, 2, 5).unwrap();
    let r = rough_from_hodge_round(4, 2, &h).unwrap();
    for (a, b) in h.expanded().iter().zip(r.expanded()) {
        assert_relative_eq!(a - 4.0, b, epsilon = 1e-12);
    }
}

#[test]
fn interval_scales_with_length() {
    for len in [0.5, 1.0, 3.0] {
        let t = interval_spectrum(len, 0, 5).unwrap();
        for (k, e) in t.entries().iter().enumerate() {
            assert_relative_eq!(
                e.eigenvalue,
                (k as f64 * PI / len).powi(2),
                max_relative = 1e-14
            );
        }
        let d = interval_spectrum(len, 1, 4).unwrap();
        assert_relative_eq!(
            d.entries()[0].eigenvalue,
            (PI / len).powi(2),
            max_relative = 1e-14
        );
    }
}

#[test]
fn first_positive_is_min_of_exact_and_coexact() {
    for n in 2..=8 {
        for p in 1..n {
            let full = sphere_hodge_spectrum(n, p, 4)
                .unwrap()
                .first_positive(1e-12)
                .unwrap();
            let ex = sphere_exact_spectrum(n, p, 1).unwrap().entries()[0].eigenvalue;
            let co = sphere_coexact_spectrum(n, p, 1).unwrap().entries()[0].eigenvalue;
            assert_eq!(full, ex.min(co), "n={n} p={p}");
        }
    }
}

#[test]
fn truncated_product_refuses_to_overreach() {
    let left = sphere_hodge_tables(2, 2).unwrap();
    let right = sphere_hodge_tables(2, 2).unwrap();
    let t = kunneth_levels(&left, &right, 2);
    assert!(matches!(t.completeness, Completeness::Through(_)));
    match kunneth_spectrum(&left, &right, 2, 1000) {
        Err(Error::InsufficientLevels { requested, .. }) => assert_eq!(requested, 1000),
        other => panic!("expected InsufficientLevels, got {other:?}"),
    }
}

#[test]
fn zero_modes_match_betti_numbers_of_products() {
    for (p, r) in [(1, 1), (2, 3), (1, 0), (3, 3)] {
        let tables = sphere_product_tables(p, r, 3).unwrap();
        let betti = betti_convolution(&sphere_betti(p), &sphere_betti(r));
        for (q, t) in tables.iter().enumerate() {
            assert_eq!(
                t.zero_multiplicity(1e-12),
                betti[q],
                "S^{p} x S^{r} degree {q}"
            );
        }
    }
}

proptest! {
    #[test]
    fn nq_is_symmetric_under_fiber_swap(m in 2usize..=8, p_seed in 0usize..8, q in 0usize..=8) {
        let p = 1 + p_seed % (m - 1);
        let q = q.min(m);
        // Swapping the fibers S^p and S^{m-p-1} is an isometry only when m-p-1 >= 1.
        prop_assume!(m - p > 1);
        let a = betti_and_nq(m, p, q).unwrap();
        let b = betti_and_nq(m, m - p - 1, q).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hodge_tables_sorted_with_positive_multiplicities(n in 1usize..=7, p_seed in 0usize..8, levels in 1usize..6) {
        let p = p_seed % (n + 1);
        let t = sphere_hodge_spectrum(n, p, levels).unwrap();
        prop_assert!(t.entries().windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue));
        prop_assert!(t.entries().iter().all(|e| e.multiplicity > 0));
    }
}
