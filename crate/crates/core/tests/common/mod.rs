#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use splitcone::metric::{full_matrix, DissimilarityMatrix, WeightVector};
use splitcone::rational::Rational;
use splitcone::split::{complete_system, Split, SplitSystem};
use splitcone_oracle as oracle;

pub fn to_q(v: &Rational) -> oracle::Q {
    oracle::Q::new(v.numer().clone(), v.denom().clone())
}

pub fn from_q(v: &oracle::Q) -> Rational {
    Rational::new(v.numer().clone(), v.denom().clone())
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (0i64..=12, 1i64..=4).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

/// `n` together with an arbitrary subset of the non-trivial splits of KN_n.
pub fn circular_system(max_n: usize) -> impl Strategy<Value = SplitSystem> {
    (2..=max_n).prop_flat_map(|n| {
        let candidates: Vec<Split> = complete_system(n).non_trivial().copied().collect();
        let len = candidates.len();
        proptest::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let chosen = candidates.iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| *s);
            SplitSystem::with_trivials(n, chosen).expect("subsets of KN_n are valid")
        })
    })
}

/// Pairwise compatible systems: intervals offered in random order, kept
/// only when compatible with everything kept so far.
pub fn compatible_system(max_n: usize) -> impl Strategy<Value = SplitSystem> {
    (2..=max_n).prop_flat_map(|n| {
        let candidates: Vec<Split> = complete_system(n).non_trivial().copied().collect();
        Just(candidates).prop_shuffle().prop_map(move |shuffled| {
            let mut kept: Vec<Split> = Vec::new();
            for s in shuffled {
                if kept.iter().all(|k| k.compatible_with(&s)) {
                    kept.push(s);
                }
            }
            SplitSystem::with_trivials(n, kept).expect("compatible subset is valid")
        })
    })
}

pub fn weights_for(sys: &SplitSystem) -> impl Strategy<Value = WeightVector> {
    let splits: Vec<Split> = sys.splits().copied().collect();
    let sys = sys.clone();
    proptest::collection::vec(small_rational(), splits.len()).prop_map(move |ws| {
        WeightVector::new(&sys, splits.iter().copied().zip(ws).collect()).expect("nonnegative weights")
    })
}

pub fn system_with_weights(max_n: usize) -> impl Strategy<Value = (SplitSystem, WeightVector)> {
    circular_system(max_n).prop_flat_map(|sys| {
        let w = weights_for(&sys);
        (Just(sys), w)
    })
}

/// Random nonnegative weights on KN_n with pendant weights raised so that
/// every leaf has the same root distance; returns the leaf-pair matrix.
pub fn cone_point(min_n: usize, max_n: usize) -> impl Strategy<Value = DissimilarityMatrix> {
    (min_n..=max_n)
        .prop_flat_map(|n| {
            let kn = complete_system(n);
            let len = kn.len();
            (Just(n), proptest::collection::vec(prop_oneof![Just(Rational::default()), small_rational()], len))
        })
        .prop_map(|(n, ws)| {
            let kn = complete_system(n);
            let mut w: Vec<(Split, Rational)> = kn.splits().copied().zip(ws).collect();
            let height = |w: &[(Split, Rational)], leaf: usize| -> Rational {
                w.iter().filter(|(s, _)| s.contains(leaf)).map(|(_, v)| v.clone()).sum()
            };
            let top = (1..=n).map(|i| height(&w, i)).max().expect("n >= 2");
            for leaf in 1..=n {
                let lift = &top - height(&w, leaf);
                let k = w.iter().position(|(s, _)| *s == Split::trivial(leaf)).expect("trivial present");
                w[k].1 += lift;
            }
            let wv = WeightVector::new(&kn, w.into_iter().collect()).expect("nonnegative");
            full_matrix(&kn, &wv).expect("nonnegative weights").matrix
        })
}

pub fn interval_set(s: &Split) -> BTreeSet<usize> {
    (s.lo()..=s.hi()).collect()
}
