mod common;

use common::{compatible_system, system_with_weights, to_q, weights_for};
use num_traits::Signed;
use proptest::prelude::*;
use splitcone::metric::{check_four_point, check_kalmanson, distance, full_matrix, WeightVector};
use splitcone_oracle as oracle;

proptest! {
    #[test]
    fn full_matrix_is_symmetric_nonnegative_and_matches_oracle((sys, w) in system_with_weights(8)) {
        let fm = full_matrix(&sys, &w).unwrap();
        let sides: Vec<_> = sys.splits().map(|s| (common::interval_set(s), to_q(&w.get(s)))).collect();
        for i in 1..=sys.n() {
            for j in 1..=sys.n() {
                prop_assert_eq!(fm.matrix.get(i, j), fm.matrix.get(j, i));
                prop_assert!(!fm.matrix.get(i, j).is_negative());
                if i != j {
                    prop_assert_eq!(to_q(&fm.matrix.get(i, j)), oracle::split_distance(&sides, i, j));
                }
            }
        }
    }

    #[test]
    fn circular_systems_give_kalmanson_metrics((sys, w) in system_with_weights(8)) {
        let d = full_matrix(&sys, &w).unwrap().matrix;
        let check = check_kalmanson(&d);
        prop_assert!(check.holds, "{:?}", check.witness);
    }

    #[test]
    fn tree_metrics_are_four_point_and_kalmanson(sys in compatible_system(8), seed in any::<u64>()) {
        let weights: Vec<_> = sys.splits().enumerate().map(|(k, s)| {
            (*s, splitcone::rational::int(((seed >> (k % 60)) & 7) as i64))
        }).collect();
        let w = WeightVector::new(&sys, weights.into_iter().collect()).unwrap();
        let d = full_matrix(&sys, &w).unwrap().matrix;
        let fp = check_four_point(&d);
        prop_assert!(fp.holds, "{:?}", fp.witness);
        prop_assert!(check_kalmanson(&d).holds);
        let independent = oracle::first_four_point_violation(sys.n(), &|i, j| to_q(&d.get(i, j)));
        prop_assert!(independent.is_none());
    }

    #[test]
    fn distance_is_additive_in_weights(
        (sys, w1, w2) in common::circular_system(7).prop_flat_map(|s| {
            let a = weights_for(&s);
            let b = weights_for(&s);
            (Just(s), a, b)
        })
    ) {
        let sum = w1.sum(&w2);
        for i in 0..=sys.n() {
            for j in 0..=sys.n() {
                prop_assert_eq!(
                    distance(&sys, &sum, i, j),
                    distance(&sys, &w1, i, j) + distance(&sys, &w2, i, j)
                );
            }
        }
    }
}

#[test]
fn four_point_scan_matches_oracle_on_non_tree() {
    let d = splitcone::DissimilarityMatrix::new(
        4,
        [2, 3, 3, 3, 3, 5].iter().map(|&v| splitcone::rational::int(v)).collect(),
    )
    .unwrap();
    let ours = check_four_point(&d);
    let theirs = oracle::first_four_point_violation(4, &|i, j| to_q(&d.get(i, j)));
    assert_eq!(ours.holds, theirs.is_none());
    assert_eq!(ours.witness.map(|w| w.quadruple), theirs.map(|(q, _)| q));
}
