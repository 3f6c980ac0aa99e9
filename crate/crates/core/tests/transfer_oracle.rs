//! The transfer matrix against an independent numeric linear solve, plus
//! canonical-form properties.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgi_core::algebra::poly_gcd;
use sgi_core::transfer::{build_transfer_matrix, default_sort_order, process_matrix, TransferMatrix};

#[test]
fn twenty_random_structures_match_linear_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 3);
        let spec = common::random_structure(seed, n);
        let raw = build_transfer_matrix(&spec);
        let processed = process_matrix(&raw, true, &default_sort_order(&spec)).unwrap();
        for _ in 0..3 {
            let point = common::random_point(&spec, &mut rng);
            let Some(expected) = common::numeric_transfer(&spec, &point) else { continue };
            for (i, want) in expected.iter().enumerate() {
                for tm in [&raw, &processed] {
                    let got = tm.entries[i].eval_rational(&point).unwrap();
                    assert_eq!(&got, want, "structure {seed}, entry {}", i + 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_entries_are_reduced_and_monic(seed in any::<u64>(), n in 1usize..=3) {
        let spec = common::random_structure(seed, n);
        let order = default_sort_order(&spec);
        let tm = process_matrix(&build_transfer_matrix(&spec), true, &order).unwrap();
        let s = TransferMatrix::laplace();
        for e in &tm.entries {
            if e.is_zero() {
                prop_assert!(e.den().is_one());
                continue;
            }
            let lc = e.den().leading_coefficient_in(&s);
            prop_assert!(lc.is_one(), "denominator {} is not monic in s", e.den());
            prop_assert!(poly_gcd(e.num(), e.den()).unwrap().is_constant());
            prop_assert!(e.num().degree_in(&s) < e.den().degree_in(&s));
            prop_assert!(e.den().degree_in(&s) as usize <= spec.n);
        }
        prop_assert!(process_matrix(&tm, true, &order).is_err());
        let unmarked = TransferMatrix { processed: false, canonical: false, ..tm.clone() };
        let again = process_matrix(&unmarked, true, &order).unwrap();
        prop_assert_eq!(again.entries, tm.entries);
    }

    #[test]
    fn processing_preserves_values(seed in any::<u64>(), canonical in any::<bool>()) {
        let spec = common::random_structure(seed, 2);
        let raw = build_transfer_matrix(&spec);
        let tm = process_matrix(&raw, canonical, &default_sort_order(&spec)).unwrap();
        let point = common::random_point(&spec, &mut ChaCha8Rng::seed_from_u64(seed));
        for (a, b) in raw.entries.iter().zip(&tm.entries) {
            if let (Ok(x), Ok(y)) = (a.eval_rational(&point), b.eval_rational(&point)) {
                prop_assert_eq!(x, y);
            }
        }
    }
}

#[test]
fn zero_output_row_is_zero() {
    let spec = common::random_structure(5, 2);
    let mut spec = spec;
    spec.c[0] = vec![sgi_core::algebra::Poly::zero(); spec.n];
    let tm = process_matrix(&build_transfer_matrix(&spec), true, &default_sort_order(&spec)).unwrap();
    assert!(tm.entries[0].is_zero());
}
