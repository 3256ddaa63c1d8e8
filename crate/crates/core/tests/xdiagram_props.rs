mod common;

use common::cone_point;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use splitcone::cone::{ray_vector, Facet, OrderedPartition};
use splitcone::xdiagram::{check_rules, f_domain, ray_for_tight_set, xdiagram_of};

fn any_partition(min_n: usize, max_n: usize) -> impl Strategy<Value = OrderedPartition> {
    (min_n..=max_n).prop_flat_map(|n| {
        (1u64..1 << (n - 1)).prop_map(move |m| OrderedPartition::from_mask(n, m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn cone_points_obey_the_local_rules(d in cone_point(2, 8)) {
        let v = check_rules(&xdiagram_of(&d));
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn f_marks_exactly_the_tight_facets(d in cone_point(3, 8)) {
        let n = d.n();
        let x = xdiagram_of(&d);
        for (k, l) in f_domain(n) {
            let facet = Facet::from_cell(k, l, n).unwrap();
            prop_assert_eq!(x.f(k, l), facet.evaluate(&d).is_zero(), "cell ({},{})", k, l);
        }
    }

    #[test]
    fn ray_diagrams_give_back_their_partition(t in any_partition(2, 7)) {
        let x = xdiagram_of(&ray_vector(&t));
        prop_assert_eq!(ray_for_tight_set(&x).unwrap(), Some(t));
    }

    #[test]
    fn ray_is_strict_off_the_tight_set(t in any_partition(3, 7)) {
        let x = xdiagram_of(&ray_vector(&t));
        let r = ray_vector(&ray_for_tight_set(&x).unwrap().unwrap());
        let tight = x.tight_set();
        for f in splitcone::cone::facets(t.n()).unwrap() {
            prop_assert_eq!(f.evaluate(&r).is_positive(), !tight.contains(&f), "{:?}", f);
        }
    }

    #[test]
    fn recovered_ray_lies_on_the_tight_facets(d in cone_point(2, 8)) {
        prop_assume!(!d.is_zero());
        let x = xdiagram_of(&d);
        let t = ray_for_tight_set(&x).unwrap().expect("nonzero point has a ray");
        let r = ray_vector(&t);
        for f in x.tight_set() {
            prop_assert!(f.evaluate(&r).is_zero(), "{:?}", f);
        }
    }
}

#[test]
fn constant_interior_is_loose_exactly_on_triangles() {
    for n in 3..=7 {
        let d = splitcone::DissimilarityMatrix::from_fn(n, |_, _| splitcone::rational::int(1)).unwrap();
        let x = xdiagram_of(&d);
        for f in splitcone::cone::facets(n).unwrap() {
            let (k, l) = f.cell(n);
            assert_eq!(x.f(k, l), !matches!(f, Facet::Triangle(_)), "n={n} {f}");
        }
    }
}
