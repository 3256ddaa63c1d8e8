mod common;

use common::{cone_point, system_with_weights};
use proptest::prelude::*;
use splitcone::io::{
    matrix_to_csv, matrix_to_json, parse_matrix, parse_matrix_csv, parse_matrix_json,
    parse_system_json, system_to_json,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrices_round_trip_through_csv_and_json(d in cone_point(2, 8)) {
        let csv = matrix_to_csv(&d);
        prop_assert_eq!(&parse_matrix_csv(&csv).unwrap(), &d);
        prop_assert_eq!(&parse_matrix(&csv).unwrap(), &d);
        let json = matrix_to_json(&d).to_string();
        prop_assert_eq!(&parse_matrix_json(&json).unwrap(), &d);
        prop_assert_eq!(&parse_matrix(&json).unwrap(), &d);
    }

    #[test]
    fn systems_round_trip_through_json((sys, w) in system_with_weights(8)) {
        let text = system_to_json(&sys, Some(&w)).to_string();
        let back = parse_system_json(&text).unwrap();
        prop_assert_eq!(&back.system, &sys);
        prop_assert_eq!(back.weights.as_ref(), Some(&w));
    }
}
