//! Dissimilarity matrices, split-induced distances and the classical
//! four-point, Kalmanson, triangle and equidistance tests.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::rational::Rational;
use crate::split::{Split, SplitSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("entry δ({i},{j}) = {value} is negative")]
    NegativeEntry { i: usize, j: usize, value: String },
    #[error("expected {expected} upper-triangular entries, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("weight for {0} is negative")]
    NegativeWeight(Split),
    #[error("weight vector has no entry for split {0}")]
    MissingWeight(Split),
    #[error("weight given for split {0}, which is not in the system")]
    ExtraWeight(Split),
    #[error("exhaustive ordering search is limited to n <= 8, got n = {0}")]
    TooManyOrderings(usize),
}

/// Symmetric matrix of leaf-pair distances `δ(i,j)`, `1 <= i < j <= n`,
/// stored row by row; the diagonal is implicitly zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DissimilarityMatrix {
    n: usize,
    upper: Vec<Rational>,
}

fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl DissimilarityMatrix {
    /// Entries in row-major order `δ(1,2), δ(1,3), …, δ(n-1,n)`.
    pub fn new(n: usize, upper: Vec<Rational>) -> Result<Self, MetricError> {
        let m = Self::from_upper_unchecked(n, upper)?;
        if let Some((i, j, v)) = m.entries().find(|(_, _, v)| v.is_negative()) {
            return Err(MetricError::NegativeEntry { i, j, value: v.to_string() });
        }
        Ok(m)
    }

    /// Accepts any sign; used for intermediate vectors of the cone geometry.
    pub(crate) fn from_upper_unchecked(
        n: usize,
        upper: Vec<Rational>,
    ) -> Result<Self, MetricError> {
        if upper.len() != upper_len(n) {
            return Err(MetricError::WrongSize { expected: upper_len(n), got: upper.len() });
        }
        Ok(DissimilarityMatrix { n, upper })
    }

    pub fn from_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> Rational,
    ) -> Result<Self, MetricError> {
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 1..=n {
            for j in i + 1..=n {
                upper.push(f(i, j));
            }
        }
        Self::new(n, upper)
    }

    pub(crate) fn from_fn_unchecked(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 1..=n {
            for j in i + 1..=n {
                upper.push(f(i, j));
            }
        }
        DissimilarityMatrix { n, upper }
    }

    pub fn zero(n: usize) -> Self {
        DissimilarityMatrix { n, upper: vec![Rational::zero(); upper_len(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.n);
        // rows 1..i-1 hold (n-1) + (n-2) + … + (n-i+1) entries
        (i - 1) * (2 * self.n - i) / 2 + (j - i - 1)
    }

    /// `δ(i,j)` for leaves `1..=n`, symmetric, zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Rational {
        assert!(i >= 1 && j >= 1 && i <= self.n && j <= self.n, "leaf index out of range");
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Rational::zero(),
            std::cmp::Ordering::Less => self.upper[self.index(i, j)].clone(),
            std::cmp::Ordering::Greater => self.upper[self.index(j, i)].clone(),
        }
    }

    pub(crate) fn at(&self, i: usize, j: usize) -> &Rational {
        &self.upper[self.index(i.min(j), i.max(j))]
    }

    /// `(i, j, δ(i,j))` for `i < j` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        (1..=self.n)
            .flat_map(move |i| (i + 1..=self.n).map(move |j| (i, j)))
            .zip(self.upper.iter())
            .map(|((i, j), v)| (i, j, v))
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn is_nonnegative(&self) -> bool {
        self.upper.iter().all(|v| !v.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(Zero::is_zero)
    }

    pub(crate) fn add_scaled(&self, other: &Self, c: &Rational) -> Self {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let upper = self.upper.iter().zip(&other.upper).map(|(a, b)| a + c * b).collect();
        DissimilarityMatrix { n: self.n, upper }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        assert!(!c.is_negative(), "scaling by a negative factor");
        DissimilarityMatrix { n: self.n, upper: self.upper.iter().map(|v| v * c).collect() }
    }

    pub fn sum(&self, other: &Self) -> Self {
        self.add_scaled(other, &Rational::from_integer(1.into()))
    }
}

impl fmt::Display for DissimilarityMatrix {
    /// Full symmetric matrix, one row per line, tab separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            let row: Vec<String> =
                (1..=self.n).map(|j| crate::rational::format(&self.get(i, j))).collect();
            writeln!(f, "{}", row.join("\t"))?;
        }
        Ok(())
    }
}

/// Weights `a_s` indexed by split. Entries produced by weight recovery may
/// be negative; [`WeightVector::is_nonnegative`] tells whether the vector
/// is a genuine weighting.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightVector {
    weights: BTreeMap<Split, Rational>,
}

impl WeightVector {
    /// Weights covering exactly the splits of `sys`, all nonnegative.
    pub fn new(sys: &SplitSystem, weights: BTreeMap<Split, Rational>) -> Result<Self, MetricError> {
        if let Some(s) = weights.keys().find(|s| !sys.contains(s)) {
            return Err(MetricError::ExtraWeight(*s));
        }
        if let Some(s) = sys.splits().find(|s| !weights.contains_key(s)) {
            return Err(MetricError::MissingWeight(*s));
        }
        if let Some((s, _)) = weights.iter().find(|(_, v)| v.is_negative()) {
            return Err(MetricError::NegativeWeight(*s));
        }
        Ok(WeightVector { weights })
    }

    pub(crate) fn from_map_unchecked(weights: BTreeMap<Split, Rational>) -> Self {
        WeightVector { weights }
    }

    pub fn uniform(sys: &SplitSystem, value: Rational) -> Self {
        assert!(!value.is_negative(), "negative uniform weight");
        WeightVector { weights: sys.splits().map(|s| (*s, value.clone())).collect() }
    }

    /// The weight of `s`, zero when `s` carries none.
    pub fn get(&self, s: &Split) -> Rational {
        self.weights.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Split, &Rational)> + '_ {
        self.weights.iter()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|v| !v.is_negative())
    }

    /// Splits with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = Split> + '_ {
        self.weights.iter().filter(|(_, v)| v.is_positive()).map(|(s, _)| *s)
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut weights = self.weights.clone();
        for (s, v) in &other.weights {
            *weights.entry(*s).or_insert_with(Rational::zero) += v;
        }
        WeightVector { weights }
    }
}

/// Sum of the weights of the splits in `sys` that separate taxa `i` and `j`.
pub fn distance(sys: &SplitSystem, w: &WeightVector, i: usize, j: usize) -> Rational {
    if i == j {
        return Rational::zero();
    }
    sys.splits().filter(|s| s.separates(i, j)).map(|s| w.get(s)).sum()
}

/// Leaf-pair matrix together with the root distances `δ(0,i)`, `i = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullMatrix {
    pub matrix: DissimilarityMatrix,
    pub root: Vec<Rational>,
}

/// Fails only when a negative weight drives some distance below zero.
pub fn full_matrix(sys: &SplitSystem, w: &WeightVector) -> Result<FullMatrix, MetricError> {
    let n = sys.n();
    let matrix = DissimilarityMatrix::from_fn(n, |i, j| distance(sys, w, i, j))?;
    let root = (1..=n).map(|i| distance(sys, w, 0, i)).collect();
    Ok(FullMatrix { matrix, root })
}

/// Outcome of an exhaustive scan: `witness` is the lexicographically first
/// violating index tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Check<W> {
    fn from_witness(witness: Option<W>) -> Self {
        Check { holds: witness.is_none(), witness }
    }
}

/// The three pair sums of a quadruple: `(ij+kl, ik+jl, il+jk)`.
pub fn quadruple_sums(
    d: &DissimilarityMatrix,
    [i, j, k, l]: [usize; 4],
) -> [Rational; 3] {
    [
        d.get(i, j) + d.get(k, l),
        d.get(i, k) + d.get(j, l),
        d.get(i, l) + d.get(j, k),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadrupleWitness {
    pub quadruple: [usize; 4],
    pub sums: [Rational; 3],
}

fn quadruples(n: usize) -> impl Iterator<Item = [usize; 4]> {
    (1..=n).combinations(4).map(|c| [c[0], c[1], c[2], c[3]])
}

/// Two of the three pair sums of every quadruple are equal and at least the third.
pub fn four_point_holds(sums: &[Rational; 3]) -> bool {
    let mut s = sums.clone();
    s.sort();
    s[1] == s[2]
}

pub fn check_four_point(d: &DissimilarityMatrix) -> Check<QuadrupleWitness> {
    Check::from_witness(quadruples(d.n()).find_map(|q| {
        let sums = quadruple_sums(d, q);
        (!four_point_holds(&sums)).then_some(QuadrupleWitness { quadruple: q, sums })
    }))
}

/// For `i<j<k<l`: `(δ(i,j)+δ(k,l), δ(i,l)+δ(j,k), δ(i,k)+δ(j,l))`; the
/// Kalmanson condition asks for the first two to be at most the third.
pub fn kalmanson_sums(d: &DissimilarityMatrix, [i, j, k, l]: [usize; 4]) -> [Rational; 3] {
    [
        d.get(i, j) + d.get(k, l),
        d.get(i, l) + d.get(j, k),
        d.get(i, k) + d.get(j, l),
    ]
}

/// Kalmanson condition for the standard ordering `1, …, n`.
pub fn check_kalmanson(d: &DissimilarityMatrix) -> Check<QuadrupleWitness> {
    Check::from_witness(quadruples(d.n()).find_map(|q| {
        let sums = kalmanson_sums(d, q);
        (sums[0] > sums[2] || sums[1] > sums[2])
            .then_some(QuadrupleWitness { quadruple: q, sums })
    }))
}

/// Searches every circular ordering of `1..=n` up to rotation and reversal;
/// returns the first (lexicographic) ordering under which the Kalmanson
/// condition holds.
pub fn kalmanson_ordering(d: &DissimilarityMatrix) -> Result<Option<Vec<usize>>, MetricError> {
    let n = d.n();
    if n > 8 {
        return Err(MetricError::TooManyOrderings(n));
    }
    if n < 4 {
        return Ok(Some((1..=n).collect()));
    }
    let candidates: Vec<Vec<usize>> = (2..=n)
        .permutations(n - 1)
        .filter(|p| p[0] < p[n - 2])
        .map(|p| std::iter::once(1).chain(p).collect())
        .collect();
    Ok(candidates
        .into_par_iter()
        .find_first(|order| {
            let permuted = DissimilarityMatrix::from_fn_unchecked(n, |i, j| {
                d.get(order[i - 1], order[j - 1])
            });
            check_kalmanson(&permuted).holds
        }))
}

/// `(x, y, z)` with `δ(x,z) > δ(x,y) + δ(y,z)`.
pub fn check_metric(d: &DissimilarityMatrix) -> Check<[usize; 3]> {
    let n = d.n();
    let witness = (1..=n)
        .flat_map(|x| (1..=n).flat_map(move |y| (x + 1..=n).map(move |z| [x, y, z])))
        .filter(|[x, y, z]| y != x && y != z)
        .find(|&[x, y, z]| d.get(x, z) > d.get(x, y) + d.get(y, z));
    Check::from_witness(witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equidistance {
    pub holds: bool,
    /// The common root distance, when there is one.
    pub root_distance: Option<Rational>,
}

pub fn check_equidistant(sys: &SplitSystem, w: &WeightVector) -> Equidistance {
    let first = distance(sys, w, 0, 1);
    let holds = (2..=sys.n()).all(|i| distance(sys, w, 0, i) == first);
    Equidistance { holds, root_distance: holds.then_some(first) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::split::complete_system;

    fn from_rows(rows: &[&[i64]]) -> DissimilarityMatrix {
        let n = rows.len();
        DissimilarityMatrix::from_fn(n, |i, j| int(rows[i - 1][j - 1])).unwrap()
    }

    fn distexample() -> DissimilarityMatrix {
        from_rows(&[
            &[0, 5, 15, 12, 17],
            &[5, 0, 16, 13, 18],
            &[15, 16, 0, 11, 16],
            &[12, 13, 11, 0, 7],
            &[17, 18, 16, 7, 0],
        ])
    }

    #[test]
    fn index_layout_is_row_major() {
        let d = DissimilarityMatrix::new(4, (1..=6).map(int).collect()).unwrap();
        assert_eq!(d.get(1, 2), int(1));
        assert_eq!(d.get(1, 4), int(3));
        assert_eq!(d.get(2, 3), int(4));
        assert_eq!(d.get(4, 3), int(6));
        assert_eq!(d.get(3, 3), int(0));
        let listed: Vec<(usize, usize)> = d.entries().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(listed, vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn rejects_negative_and_misshaped() {
        assert!(matches!(
            DissimilarityMatrix::new(3, vec![int(1), int(-1), int(0)]),
            Err(MetricError::NegativeEntry { i: 1, j: 3, .. })
        ));
        assert!(matches!(
            DissimilarityMatrix::new(3, vec![int(1)]),
            Err(MetricError::WrongSize { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn distexample_is_a_tree_metric() {
        let d = distexample();
        assert!(check_four_point(&d).holds);
        assert_eq!(quadruple_sums(&d, [1, 2, 3, 4]), [int(16), int(28), int(28)]);
        assert!(check_metric(&d).holds);
        assert!(check_kalmanson(&d).holds);
    }

    #[test]
    fn small_matrices_pass_vacuously() {
        let d = from_rows(&[&[0, 5, 1], &[5, 0, 1], &[1, 1, 0]]);
        assert!(check_four_point(&d).holds);
        assert!(check_kalmanson(&d).holds);
        assert!(check_metric(&DissimilarityMatrix::zero(4)).holds);
    }

    #[test]
    fn triangle_violation_witness() {
        let d = from_rows(&[
            &[0, 1, 10, 6],
            &[1, 0, 1, 6],
            &[10, 1, 0, 6],
            &[6, 6, 6, 0],
        ]);
        let c = check_metric(&d);
        assert!(!c.holds);
        assert_eq!(c.witness, Some([1, 2, 3]));
    }

    #[test]
    fn equidistance_examples() {
        let kn3 = complete_system(3);
        let e = check_equidistant(&kn3, &WeightVector::uniform(&kn3, int(1)));
        assert!(!e.holds);
        let leveled = WeightVector::new(
            &kn3,
            [((1, 1), 2), ((2, 2), 1), ((3, 3), 2), ((1, 2), 1), ((2, 3), 1)]
                .into_iter()
                .map(|((lo, hi), v)| (Split::new(lo, hi, 3).unwrap(), int(v)))
                .collect(),
        )
        .unwrap();
        let e = check_equidistant(&kn3, &leveled);
        assert_eq!(e, Equidistance { holds: true, root_distance: Some(int(3)) });
        let fm = full_matrix(&kn3, &WeightVector::uniform(&kn3, int(1))).unwrap();
        assert_eq!((fm.matrix.get(1, 2), fm.matrix.get(2, 3), fm.matrix.get(1, 3)), (int(3), int(3), int(4)));

        let kn2 = complete_system(2);
        let w = WeightVector::new(
            &kn2,
            [(Split::trivial(1), int(1)), (Split::trivial(2), int(2))].into_iter().collect(),
        )
        .unwrap();
        assert!(!check_equidistant(&kn2, &w).holds);
    }

    #[test]
    fn weight_vector_domain_is_checked() {
        let kn3 = complete_system(3);
        let partial: BTreeMap<Split, Rational> = [(Split::trivial(1), int(1))].into_iter().collect();
        assert!(matches!(WeightVector::new(&kn3, partial), Err(MetricError::MissingWeight(_))));
        let mut neg: BTreeMap<Split, Rational> = kn3.splits().map(|s| (*s, int(0))).collect();
        neg.insert(Split::trivial(2), int(-1));
        assert_eq!(WeightVector::new(&kn3, neg), Err(MetricError::NegativeWeight(Split::trivial(2))));
    }

    #[test]
    fn zero_weights_give_zero_distances() {
        let kn4 = complete_system(4);
        let fm = full_matrix(&kn4, &WeightVector::uniform(&kn4, int(0))).unwrap();
        assert!(fm.matrix.is_zero());
        assert!(fm.root.iter().all(Zero::is_zero));
    }

    #[test]
    fn ordering_search_finds_relabelled_circular_metric() {
        // induced by KN_5 under the order 1,3,5,2,4, then relabelled
        let kn5 = complete_system(5);
        let fm = full_matrix(&kn5, &WeightVector::uniform(&kn5, int(1))).unwrap();
        let perm = [1usize, 4, 2, 5, 3];
        let d = DissimilarityMatrix::from_fn(5, |i, j| fm.matrix.get(perm[i - 1], perm[j - 1])).unwrap();
        assert!(!check_kalmanson(&d).holds);
        let order = kalmanson_ordering(&d).unwrap().expect("some ordering works");
        let reordered =
            DissimilarityMatrix::from_fn(5, |i, j| d.get(order[i - 1], order[j - 1])).unwrap();
        assert!(check_kalmanson(&reordered).holds);
        assert!(kalmanson_ordering(&DissimilarityMatrix::zero(9)).is_err());
    }
}
