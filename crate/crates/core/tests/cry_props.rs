use std::collections::HashSet;

use num_traits::{One, Zero};
use proptest::prelude::*;
use splitcone::cry::{
    count_cry_points, count_lattice_points, cry_vertices, ehrhart_polynomial, pedc_vertices, phi,
    psi, CryMatrix, PedcPoint,
};
use splitcone::rational::int;
use splitcone::Rational;
use splitcone_oracle as oracle;

fn convex_point() -> impl Strategy<Value = CryMatrix> {
    (2usize..=6).prop_flat_map(|n| {
        let count = 1usize << (n - 1);
        proptest::collection::vec(0i64..=5, count).prop_map(move |raw| {
            let mut raw = raw;
            if raw.iter().all(|&c| c == 0) {
                raw[0] = 1;
            }
            let total: i64 = raw.iter().sum();
            let parts: Vec<(Rational, CryMatrix)> = raw
                .iter()
                .zip(cry_vertices(n))
                .map(|(&c, v)| (Rational::new(c.into(), total.into()), v))
                .collect();
            CryMatrix::convex_combination(&parts).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psi_inverts_phi(x in convex_point()) {
        let p = phi(&x);
        prop_assert!(PedcPoint::new(p.matrix().clone()).is_ok());
        prop_assert_eq!(psi(&p), x);
    }

    #[test]
    fn cry_points_are_doubly_stochastic(x in convex_point()) {
        let n = x.n();
        for i in 1..=n {
            let row: Rational = (1..=n).map(|j| x.get(i, j).clone()).sum();
            let col: Rational = (1..=n).map(|j| x.get(j, i).clone()).sum();
            prop_assert!(row.is_one() && col.is_one());
        }
    }
}

#[test]
fn phi_maps_vertices_onto_vertices() {
    for n in 2..=7 {
        let images: HashSet<PedcPoint> = cry_vertices(n).iter().map(phi).collect();
        let targets: HashSet<PedcPoint> = pedc_vertices(n).into_iter().collect();
        assert_eq!(images, targets, "n={n}");
        for v in cry_vertices(n) {
            assert_eq!(psi(&phi(&v)), v);
        }
    }
}

#[test]
fn lattice_counts_agree_across_the_isomorphism() {
    for (n, max_t) in [(2, 4), (3, 4), (4, 3)] {
        for t in 0..=max_t {
            let c = count_lattice_points(n, t).unwrap();
            assert_eq!(c.pedc, c.cry, "n={n} t={t}");
            assert_eq!(c.cry, oracle::count_cry_matrices(n, t as u64), "n={n} t={t}");
        }
    }
}

#[test]
fn ehrhart_polynomial_predicts_unseen_dilations() {
    for n in 2..=3 {
        let poly = ehrhart_polynomial(n).unwrap();
        let d = poly.len() - 1;
        for t in d + 1..=4 {
            let value: Rational = poly
                .iter()
                .enumerate()
                .map(|(p, c)| c * int(t as i64).pow(p as i32))
                .fold(Rational::zero(), |a, b| a + b);
            assert_eq!(value, int(count_cry_points(n, t).unwrap() as i64), "n={n} t={t}");
        }
    }
}
