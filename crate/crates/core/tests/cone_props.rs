mod common;

use common::{cone_point, to_q};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use splitcone::cone::{
    all_rays, decompose, facet_incidence, facet_incidence_direct, facets, membership, ray_vector,
    recover_weights, resum, rays_of_face, Facet, Membership, OrderedPartition,
};
use splitcone::metric::{check_equidistant, full_matrix};
use splitcone::split::complete_system;
use splitcone::DissimilarityMatrix;
use splitcone_oracle as oracle;

/// Normal of each facet written out from its inequality, over oracle coordinates.
fn normal(f: &Facet, n: usize) -> Vec<oracle::Q> {
    let mut v = vec![oracle::q(0); n * (n - 1) / 2];
    let mut add = |i: usize, j: usize, c: i64| v[oracle::pair_index(n, i, j)] += oracle::q(c);
    match *f {
        Facet::Left(i) => {
            add(1, i + 1, 1);
            add(1, i, -1);
        }
        Facet::Right(i) => {
            add(i - 1, n, 1);
            add(i, n, -1);
        }
        Facet::Triangle(i) => {
            add(i - 1, i, 1);
            add(i, i + 1, 1);
            add(i - 1, i + 1, -1);
        }
        Facet::Covering(i, j) => {
            add(i - 1, j, 1);
            add(i, j + 1, 1);
            add(i, j, -1);
            add(i - 1, j + 1, -1);
        }
    }
    v
}

fn coords(d: &DissimilarityMatrix) -> Vec<oracle::Q> {
    oracle::pairs(d.n()).into_iter().map(|(i, j)| to_q(&d.get(i, j))).collect()
}

fn dot(a: &[oracle::Q], b: &[oracle::Q]) -> oracle::Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn any_partition(min_n: usize, max_n: usize) -> impl Strategy<Value = OrderedPartition> {
    (min_n..=max_n).prop_flat_map(|n| {
        (1u64..1 << (n - 1)).prop_map(move |m| OrderedPartition::from_mask(n, m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_recovery_round_trips(d in cone_point(2, 7)) {
        let n = d.n();
        let w = recover_weights(&d);
        prop_assert!(w.is_nonnegative());
        let kn = complete_system(n);
        prop_assert_eq!(&full_matrix(&kn, &w).unwrap().matrix, &d);
        prop_assert!(check_equidistant(&kn, &w).holds);
    }

    #[test]
    fn rays_round_trip_through_weights(t in any_partition(2, 7)) {
        let r = ray_vector(&t);
        let w = recover_weights(&r);
        prop_assert!(w.is_nonnegative());
        prop_assert_eq!(full_matrix(&complete_system(t.n()), &w).unwrap().matrix, r);
    }

    #[test]
    fn ray_vector_matches_block_indicator(t in any_partition(2, 10)) {
        let blocks: Vec<Vec<usize>> = t.blocks().into_iter().map(|(a, b)| (a..=b).collect()).collect();
        prop_assert_eq!(coords(&ray_vector(&t)), oracle::partition_vector(t.n(), &blocks));
    }

    #[test]
    fn incidence_rules_match_substitution(t in any_partition(3, 12)) {
        prop_assert_eq!(facet_incidence(&t, t.n()), facet_incidence_direct(&t));
        let r = coords(&ray_vector(&t));
        let by_normal: std::collections::BTreeSet<Facet> = facets(t.n()).unwrap().into_iter()
            .filter(|f| dot(&normal(f, t.n()), &r).is_zero()).collect();
        prop_assert_eq!(facet_incidence_direct(&t), by_normal);
    }

    #[test]
    fn cone_points_are_monotone(d in cone_point(2, 8)) {
        let n = d.n();
        for i in 1..=n {
            for j in i + 1..=n {
                for k in j + 1..=n {
                    prop_assert!(d.get(i, j) <= d.get(i, k));
                    prop_assert!(d.get(j, k) <= d.get(i, k));
                }
            }
        }
    }

    #[test]
    fn facet_functionals_match_inequalities(d in cone_point(3, 8)) {
        let x = coords(&d);
        for f in facets(d.n()).unwrap() {
            let v = dot(&normal(&f, d.n()), &x);
            prop_assert_eq!(to_q(&f.evaluate(&d)), v.clone());
            prop_assert!(!v.is_negative());
        }
    }

    #[test]
    fn rays_are_extreme(t in any_partition(3, 6)) {
        let n = t.n();
        let tight: Vec<Vec<oracle::Q>> = facet_incidence_direct(&t).iter().map(|f| normal(f, n)).collect();
        prop_assert_eq!(oracle::rank(&tight), n * (n - 1) / 2 - 1);
    }

    #[test]
    fn decomposition_resums_on_the_membership_face(d in cone_point(2, 7)) {
        let n = d.n();
        let terms = decompose(&d).unwrap();
        prop_assert_eq!(&resum(n, &terms), &d);
        prop_assert!(terms.iter().all(|t| t.coefficient.is_positive()));
        let face = match membership(&d, &complete_system(n)) {
            Membership::Interior => complete_system(n),
            Membership::OnFace(s) => s,
            Membership::Outside(v) => return Err(TestCaseError::fail(format!("{v:?}"))),
        };
        let allowed = rays_of_face(&face);
        prop_assert!(terms.iter().all(|t| allowed.contains(&t.tau)));
    }
}

#[test]
fn every_ray_satisfies_every_facet() {
    for n in 3..=10 {
        let normals: Vec<_> = facets(n).unwrap().iter().map(|f| normal(f, n)).collect();
        for t in all_rays(n) {
            let r = coords(&ray_vector(&t));
            assert!(normals.iter().all(|b| !dot(b, &r).is_negative()), "n={n} τ={t:?}");
        }
    }
}

#[test]
fn rays_span_the_ambient_space() {
    for n in 2..=7 {
        let rows: Vec<_> = all_rays(n).iter().map(|t| coords(&ray_vector(t))).collect();
        assert_eq!(oracle::rank(&rows), n * (n - 1) / 2, "n={n}");
    }
}

#[test]
fn equidistance_constraints_have_rank_n_minus_one() {
    // root distances of the leaves, as functionals on the weights of KN_n
    for n in 2..=7 {
        let kn = complete_system(n);
        let root: Vec<Vec<oracle::Q>> = (1..=n)
            .map(|i| kn.splits().map(|s| oracle::q(s.contains(i) as i64)).collect())
            .collect();
        let diffs: Vec<Vec<oracle::Q>> = root[1..]
            .iter()
            .map(|r| r.iter().zip(&root[0]).map(|(a, b)| a - b).collect())
            .collect();
        assert_eq!(oracle::rank(&diffs), n - 1, "n={n}");
    }
}
