//! Circular splits of the taxa `0..=n` and split systems.
//!
//! A split is always stored by the side that does not contain the root `0`.
//! For a system that is circular under the standard order that side is an
//! interval `[lo, hi]` of `1..=n`. The interval `[1, n]` would be the root's
//! own trivial split, which is never part of a system.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("split [{lo},{hi}] is not an interval of 1..={n}")]
    OutOfRange { lo: usize, hi: usize, n: usize },
    #[error("[1,{0}] is the root's trivial split and cannot be part of a system")]
    RootTrivial(usize),
    #[error("root-free side {0:?} is not a contiguous interval of the standard order")]
    NotCircular(Vec<usize>),
    #[error("malformed split: {0}")]
    Malformed(String),
    #[error("duplicate split {0}")]
    Duplicate(Split),
    #[error("a split system needs n >= 2 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("taxon {taxon} is not in 0..={n}")]
    UnknownTaxon { taxon: usize, n: usize },
}

/// The split `{lo..=hi} | rest`, where the rest always contains the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Split {
    lo: usize,
    hi: usize,
}

impl Split {
    /// Validated constructor for a system on `n` leaves.
    pub fn new(lo: usize, hi: usize, n: usize) -> Result<Self, SplitError> {
        if lo == 0 || lo > hi || hi > n {
            return Err(SplitError::OutOfRange { lo, hi, n });
        }
        if lo == 1 && hi == n {
            return Err(SplitError::RootTrivial(n));
        }
        Ok(Split { lo, hi })
    }

    /// Internal constructor; the caller guarantees `1 <= lo <= hi` and that
    /// `[lo, hi]` is not the root interval of the system it ends up in.
    pub(crate) const fn interval(lo: usize, hi: usize) -> Self {
        Split { lo, hi }
    }

    pub fn trivial(leaf: usize) -> Self {
        assert!(leaf >= 1, "the root has no trivial split");
        Split { lo: leaf, hi: leaf }
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn is_trivial(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether `taxon` lies on the root-free side.
    pub fn contains(&self, taxon: usize) -> bool {
        self.lo <= taxon && taxon <= self.hi
    }

    /// The separation indicator: exactly one of `i`, `j` is inside the interval.
    pub fn separates(&self, i: usize, j: usize) -> bool {
        self.contains(i) != self.contains(j)
    }

    pub fn expand(&self, n: usize) -> GeneralSplit {
        let inside: BTreeSet<usize> = (self.lo..=self.hi).collect();
        let outside: BTreeSet<usize> = (0..=n).filter(|t| !inside.contains(t)).collect();
        GeneralSplit { side_a: inside, side_b: outside }
    }

    /// Two circular splits are compatible iff their intervals are nested or
    /// disjoint: the intersection of the two root sides always holds `0`.
    pub fn compatible_with(&self, other: &Split) -> bool {
        let disjoint = self.hi < other.lo || other.hi < self.lo;
        let nested = (self.lo <= other.lo && other.hi <= self.hi)
            || (other.lo <= self.lo && self.hi <= other.hi);
        disjoint || nested
    }

    /// Set-pair notation such as `12|0345`.
    pub fn set_notation(&self, n: usize) -> String {
        let join = |it: &mut dyn Iterator<Item = usize>| {
            let v: Vec<String> = it.map(|t| t.to_string()).collect();
            if n >= 10 {
                v.join(",")
            } else {
                v.concat()
            }
        };
        let inside = join(&mut (self.lo..=self.hi));
        let outside = join(&mut (0..=n).filter(|t| !self.contains(*t)));
        format!("{inside}|{outside}")
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A bipartition of `0..=n` given as two explicit sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSplit {
    side_a: BTreeSet<usize>,
    side_b: BTreeSet<usize>,
}

impl GeneralSplit {
    pub fn new(
        side_a: impl IntoIterator<Item = usize>,
        side_b: impl IntoIterator<Item = usize>,
        n: usize,
    ) -> Result<Self, SplitError> {
        let side_a: BTreeSet<usize> = side_a.into_iter().collect();
        let side_b: BTreeSet<usize> = side_b.into_iter().collect();
        if side_a.is_empty() || side_b.is_empty() {
            return Err(SplitError::Malformed("both sides must be nonempty".into()));
        }
        if let Some(t) = side_a.intersection(&side_b).next() {
            return Err(SplitError::Malformed(format!("taxon {t} is on both sides")));
        }
        if let Some(&t) = side_a.iter().chain(&side_b).find(|&&t| t > n) {
            return Err(SplitError::UnknownTaxon { taxon: t, n });
        }
        if side_a.len() + side_b.len() != n + 1 {
            let missing: Vec<usize> = (0..=n)
                .filter(|t| !side_a.contains(t) && !side_b.contains(t))
                .collect();
            return Err(SplitError::Malformed(format!("taxa {missing:?} are on neither side")));
        }
        Ok(GeneralSplit { side_a, side_b })
    }

    pub fn side_a(&self) -> &BTreeSet<usize> {
        &self.side_a
    }

    pub fn side_b(&self) -> &BTreeSet<usize> {
        &self.side_b
    }

    fn root_free_side(&self) -> &BTreeSet<usize> {
        if self.side_a.contains(&0) {
            &self.side_b
        } else {
            &self.side_a
        }
    }
}

/// Canonical interval form of a set-pair split on `0..=n`.
pub fn canonicalize(s: &GeneralSplit, n: usize) -> Result<Split, SplitError> {
    let side = s.root_free_side();
    let lo = *side.first().expect("sides are nonempty");
    let hi = *side.last().expect("sides are nonempty");
    if hi > n {
        return Err(SplitError::UnknownTaxon { taxon: hi, n });
    }
    if hi - lo + 1 != side.len() {
        return Err(SplitError::NotCircular(side.iter().copied().collect()));
    }
    if lo == 1 && hi == n {
        return Err(SplitError::RootTrivial(n));
    }
    Ok(Split::interval(lo, hi))
}

/// Relabels a split of the unrooted taxa `1..=m` so that `root` plays the role
/// of `0`; the remaining labels are renumbered `1..=m-1` going around the
/// circle from `root + 1`.
///
/// Returns `None` for the root's own trivial split, which a rooted system drops.
pub fn reroot(
    side_a: &[usize],
    side_b: &[usize],
    m: usize,
    root: usize,
) -> Result<Option<Split>, SplitError> {
    if root == 0 || root > m {
        return Err(SplitError::UnknownTaxon { taxon: root, n: m });
    }
    let relabel = |t: usize| -> Result<usize, SplitError> {
        if t == 0 || t > m {
            return Err(SplitError::UnknownTaxon { taxon: t, n: m });
        }
        Ok((t + m - root) % m)
    };
    let a = side_a.iter().map(|&t| relabel(t)).collect::<Result<Vec<_>, _>>()?;
    let b = side_b.iter().map(|&t| relabel(t)).collect::<Result<Vec<_>, _>>()?;
    let general = GeneralSplit::new(a, b, m - 1)?;
    match canonicalize(&general, m - 1) {
        Ok(s) => Ok(Some(s)),
        Err(SplitError::RootTrivial(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A circular split system on leaves `1..=n` that always holds every leaf's
/// trivial split.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitSystem {
    n: usize,
    splits: BTreeSet<Split>,
}

impl SplitSystem {
    /// Builds a system from splits that must already include all trivial
    /// splits; see [`SplitSystem::with_trivials`] for the lenient form.
    pub fn new(n: usize, splits: impl IntoIterator<Item = Split>) -> Result<Self, SplitError> {
        let sys = Self::collect(n, splits)?;
        if let Some(leaf) = (1..=n).find(|&i| !sys.splits.contains(&Split::trivial(i))) {
            return Err(SplitError::Malformed(format!("missing trivial split of leaf {leaf}")));
        }
        Ok(sys)
    }

    /// Adds every missing trivial split; duplicates among `splits` are still errors.
    pub fn with_trivials(
        n: usize,
        splits: impl IntoIterator<Item = Split>,
    ) -> Result<Self, SplitError> {
        let mut sys = Self::collect(n, splits)?;
        sys.splits.extend((1..=n).map(Split::trivial));
        Ok(sys)
    }

    fn collect(n: usize, splits: impl IntoIterator<Item = Split>) -> Result<Self, SplitError> {
        if n < 2 {
            return Err(SplitError::TooFewLeaves(n));
        }
        let mut set = BTreeSet::new();
        for s in splits {
            Split::new(s.lo, s.hi, n)?;
            if !set.insert(s) {
                return Err(SplitError::Duplicate(s));
            }
        }
        Ok(SplitSystem { n, splits: set })
    }

    /// Only the trivial splits.
    pub fn trivial(n: usize) -> Self {
        SplitSystem { n, splits: (1..=n).map(Split::trivial).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Splits in `(lo, hi)` lexicographic order.
    pub fn splits(&self) -> impl Iterator<Item = &Split> + '_ {
        self.splits.iter()
    }

    pub fn non_trivial(&self) -> impl Iterator<Item = &Split> + '_ {
        self.splits.iter().filter(|s| !s.is_trivial())
    }

    pub fn len(&self) -> usize {
        self.splits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.splits.is_empty()
    }

    pub fn contains(&self, s: &Split) -> bool {
        self.splits.contains(s)
    }

    pub fn is_complete(&self) -> bool {
        self.splits.len() == complete_count(self.n)
    }
}

fn complete_count(n: usize) -> usize {
    n * (n + 1) / 2 - 1
}

/// `KN_n`: every interval of `1..=n` except `[1, n]`.
pub fn complete_system(n: usize) -> SplitSystem {
    assert!(n >= 2, "complete system needs at least two leaves");
    let mut splits = BTreeSet::new();
    for lo in 1..=n {
        for hi in lo..=n {
            if !(lo == 1 && hi == n) {
                splits.insert(Split::interval(lo, hi));
            }
        }
    }
    SplitSystem { n, splits }
}

/// Outcome of the pairwise compatibility scan; `witness` is the first
/// incompatible pair in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compatibility {
    pub compatible: bool,
    pub witness: Option<(Split, Split)>,
}

pub fn pairwise_compatible(sys: &SplitSystem) -> Compatibility {
    let splits: Vec<&Split> = sys.splits().collect();
    for (a, s) in splits.iter().enumerate() {
        for t in &splits[a + 1..] {
            if !s.compatible_with(t) {
                return Compatibility { compatible: false, witness: Some((**s, **t)) };
            }
        }
    }
    Compatibility { compatible: true, witness: None }
}

/// A chord of the dual `(n+1)`-gon between two vertex labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagonal {
    pub from: usize,
    pub to: usize,
}

/// Chord `(lo, hi + 1)` for each non-trivial split, taking vertex `n + 1` as `0`.
///
/// Polygon edges are labeled `0..=n` clockwise and vertex `v` is where edge
/// `v` starts, so the chord cuts off exactly the edges `lo..=hi`.
pub fn polygon_diagonals(sys: &SplitSystem) -> Vec<Diagonal> {
    let m = sys.n() + 1;
    sys.non_trivial()
        .map(|s| Diagonal { from: s.lo(), to: (s.hi() + 1) % m })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(a: &[usize], b: &[usize], n: usize) -> GeneralSplit {
        GeneralSplit::new(a.iter().copied(), b.iter().copied(), n).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&gs(&[2, 3], &[0, 1, 4, 5], 5), 5), Ok(Split::interval(2, 3)));
        assert_eq!(canonicalize(&gs(&[0, 1, 4, 5], &[2, 3], 5), 5), Ok(Split::interval(2, 3)));
        assert_eq!(canonicalize(&gs(&[3], &[0, 1, 2, 4, 5], 5), 5), Ok(Split::trivial(3)));
        assert_eq!(
            canonicalize(&gs(&[1, 3], &[0, 2, 4, 5], 5), 5),
            Err(SplitError::NotCircular(vec![1, 3]))
        );
        assert_eq!(
            canonicalize(&gs(&[0], &[1, 2, 3, 4, 5], 5), 5),
            Err(SplitError::RootTrivial(5))
        );
    }

    #[test]
    fn general_split_rejects_bad_sides() {
        assert!(GeneralSplit::new([1, 2], [2, 0, 3], 3).is_err());
        assert!(GeneralSplit::new([1], [0, 2], 3).is_err());
        assert!(GeneralSplit::new([1, 7], [0, 2, 3], 3).is_err());
        assert!(GeneralSplit::new(Vec::<usize>::new(), [0, 1, 2, 3], 3).is_err());
    }

    #[test]
    fn complete_system_counts() {
        assert_eq!(complete_system(5).len(), 14);
        let kn2: Vec<Split> = complete_system(2).splits().copied().collect();
        assert_eq!(kn2, vec![Split::trivial(1), Split::trivial(2)]);
        assert_eq!(complete_system(6).len(), 20);
        for n in 2..=12 {
            assert_eq!(complete_system(n).len(), n * (n + 1) / 2 - 1);
            assert!(complete_system(n).is_complete());
        }
    }

    #[test]
    fn separation_examples() {
        let s = Split::interval(1, 2);
        assert!(s.separates(1, 3));
        assert!(!s.separates(3, 4));
        assert!(Split::interval(2, 4).separates(0, 3));
        assert!(!Split::interval(2, 4).separates(0, 5));
    }

    #[test]
    fn split_validation() {
        assert_eq!(Split::new(1, 5, 5), Err(SplitError::RootTrivial(5)));
        assert!(Split::new(0, 2, 5).is_err());
        assert!(Split::new(3, 2, 5).is_err());
        assert!(Split::new(2, 6, 5).is_err());
        assert!(SplitSystem::new(3, [Split::trivial(1), Split::trivial(2)]).is_err());
        assert_eq!(
            SplitSystem::with_trivials(3, [Split::interval(1, 2), Split::interval(1, 2)]),
            Err(SplitError::Duplicate(Split::interval(1, 2)))
        );
    }

    fn unrooted(m: usize, root: usize, splits: &[(&[usize], &[usize])]) -> SplitSystem {
        let mut out = Vec::new();
        for (a, b) in splits {
            if let Some(s) = reroot(a, b, m, root).unwrap() {
                out.push(s);
            }
        }
        SplitSystem::with_trivials(m - 1, out).unwrap()
    }

    #[test]
    fn tree_example_is_compatible() {
        let sys = unrooted(
            6,
            6,
            &[(&[1, 2], &[3, 4, 5, 6]), (&[1, 2, 6, 5], &[3, 4]), (&[1, 2, 3, 4], &[5, 6])],
        );
        let c = pairwise_compatible(&sys);
        assert!(c.compatible);
        assert_eq!(c.witness, None);
    }

    #[test]
    fn network_example_reports_witness() {
        let sys = unrooted(6, 6, &[(&[1, 2], &[3, 4, 5, 6]), (&[1, 6], &[2, 3, 4, 5])]);
        let c = pairwise_compatible(&sys);
        assert!(!c.compatible);
        // 12|3456 -> [1,2]; 16|2345 -> [2,5] once 6 is the root
        assert_eq!(c.witness, Some((Split::interval(1, 2), Split::interval(2, 5))));
        assert!(pairwise_compatible(&SplitSystem::trivial(4)).compatible);
    }

    #[test]
    fn reroot_drops_root_trivial() {
        assert_eq!(reroot(&[6], &[1, 2, 3, 4, 5], 6, 6), Ok(None));
        assert_eq!(reroot(&[1], &[2, 3, 4, 5, 6], 6, 3), Ok(Some(Split::trivial(4))));
    }

    #[test]
    fn dual_polygon_example() {
        let sys = SplitSystem::with_trivials(
            5,
            [
                Split::interval(2, 5),
                Split::interval(1, 2),
                Split::interval(2, 3),
                Split::interval(4, 5),
            ],
        )
        .unwrap();
        let mut got: Vec<(usize, usize)> = polygon_diagonals(&sys)
            .into_iter()
            .map(|d| (d.from.min(d.to), d.from.max(d.to)))
            .collect();
        got.sort();
        assert_eq!(got, vec![(0, 2), (0, 4), (1, 3), (2, 4)]);
        assert!(polygon_diagonals(&SplitSystem::trivial(5)).is_empty());
    }

    #[test]
    fn complete_pentagon_has_every_chord() {
        // the 5-gon of KN_4 has 5 * 2 / 2 = 5 chords
        let mut got: Vec<(usize, usize)> = polygon_diagonals(&complete_system(4))
            .into_iter()
            .map(|d| (d.from.min(d.to), d.from.max(d.to)))
            .collect();
        got.sort();
        let mut expected = Vec::new();
        for u in 0..5usize {
            for v in u + 2..5 {
                if !(u == 0 && v == 4) {
                    expected.push((u, v));
                }
            }
        }
        assert_eq!(got, expected);
    }

    #[test]
    fn set_notation_round_trip() {
        let n = 5;
        for s in complete_system(n).splits() {
            let g = s.expand(n);
            assert_eq!(canonicalize(&g, n), Ok(*s));
        }
        assert_eq!(Split::interval(2, 3).set_notation(5), "23|0145");
    }
}
