mod common;

use proptest::prelude::*;
use splitcone::split::{canonicalize, complete_system, polygon_diagonals, Split, SplitSystem};

fn any_split() -> impl Strategy<Value = (usize, Split)> {
    (2usize..=12).prop_flat_map(|n| {
        (1..=n).prop_flat_map(move |lo| {
            (lo..=n)
                .prop_filter("root interval", move |&hi| (lo, hi) != (1, n))
                .prop_map(move |hi| (n, Split::new(lo, hi, n).unwrap()))
        })
    })
}

proptest! {
    #[test]
    fn expand_then_canonicalize_is_identity((n, s) in any_split()) {
        prop_assert_eq!(canonicalize(&s.expand(n), n).unwrap(), s);
        let g = s.expand(n);
        let swapped = splitcone::GeneralSplit::new(g.side_b().iter().copied(), g.side_a().iter().copied(), n).unwrap();
        prop_assert_eq!(canonicalize(&swapped, n).unwrap(), s);
    }

    #[test]
    fn diagonal_cuts_off_the_interval_edges((n, s) in any_split()) {
        prop_assume!(!s.is_trivial());
        let sys = SplitSystem::with_trivials(n, [s]).unwrap();
        let d = polygon_diagonals(&sys)[0];
        let m = n + 1;
        // polygon edge t joins vertices t and t+1; walk clockwise from `from` to `to`
        let mut edges = Vec::new();
        let mut v = d.from;
        while v != d.to {
            edges.push(v);
            v = (v + 1) % m;
        }
        prop_assert_eq!(edges, (s.lo()..=s.hi()).collect::<Vec<_>>());
    }

    #[test]
    fn separation_is_symmetric((n, s) in any_split(), i in 0usize..=12, j in 0usize..=12) {
        prop_assume!(i <= n && j <= n && i != j);
        prop_assert_eq!(s.separates(i, j), s.separates(j, i));
    }

    #[test]
    fn each_split_has_two_nonempty_classes((n, s) in any_split()) {
        let g = s.expand(n);
        prop_assert!(!g.side_a().is_empty() && !g.side_b().is_empty());
        prop_assert_eq!(g.side_a().len() + g.side_b().len(), n + 1);
        prop_assert!(g.side_b().contains(&0));
    }
}

#[test]
fn complete_system_sizes() {
    for n in 2..=12 {
        assert_eq!(complete_system(n).len(), n * (n + 1) / 2 - 1, "n={n}");
    }
}
