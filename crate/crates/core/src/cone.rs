//! Facets, weight recovery, membership, extreme rays and conic
//! decomposition for the equidistant cone of the complete system `KN_n`.
//!
//! Coordinates are the leaf-pair distances `δ(i,j)`, `1 <= i < j <= n`.
//! Each facet sits at one cell `(k,l)` of the bordered matrix used by the
//! X-diagram, with functional
//! `δ̃(k,l) + δ̃(k+1,l+1) - δ̃(k+1,l) - δ̃(k,l+1)`, where the border row `0`
//! and column `n+1` are `1` and the diagonal `δ̃(i,i)` is `0`. The cell
//! `(k,l)` is paired with the split `[k+1, l]`, whose recovered weight is
//! half the facet value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::metric::{DissimilarityMatrix, WeightVector};
use crate::rational::{self, Rational};
use crate::split::{complete_system, Split, SplitSystem};
use crate::xdiagram;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("the facet description needs n >= 3, got n = {0}")]
    TooSmall(usize),
    #[error("point is outside the cone: {0}")]
    NotInCone(String),
    #[error("invalid fixed-order partition: {0}")]
    BadPartition(String),
    #[error("matrix has n = {matrix} but the split system has n = {system}")]
    SizeMismatch { matrix: usize, system: usize },
}

/// One facet inequality `b·δ >= 0` of the cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Facet {
    /// `δ(1,i) <= δ(1,i+1)`, `2 <= i <= n-1`.
    Left(usize),
    /// `δ(i,n) <= δ(i-1,n)`, `2 <= i <= n-1`.
    Right(usize),
    /// `δ(i-1,i+1) <= δ(i-1,i) + δ(i,i+1)`, `2 <= i <= n-1`.
    Triangle(usize),
    /// `δ(i,j) + δ(i-1,j+1) <= δ(i,j+1) + δ(i-1,j)`, `2 <= i < j <= n-1`.
    Covering(usize, usize),
}

impl Facet {
    /// Bordered-matrix cell `(k,l)` carrying this facet.
    pub fn cell(&self, n: usize) -> (usize, usize) {
        match *self {
            Facet::Left(i) => (0, i),
            Facet::Right(i) => (i - 1, n),
            Facet::Triangle(i) => (i - 1, i),
            Facet::Covering(i, j) => (i - 1, j),
        }
    }

    /// Inverse of [`Facet::cell`]; `None` outside the facet cells
    /// `k in [0,n-2]`, `l in [2,n]`, `k < l`, `(k,l) != (0,n)`.
    pub fn from_cell(k: usize, l: usize, n: usize) -> Option<Facet> {
        if n < 3 || k + 2 > n || l < 2 || l > n || k >= l || (k == 0 && l == n) {
            return None;
        }
        Some(if k == 0 {
            Facet::Left(l)
        } else if l == n {
            Facet::Right(k + 1)
        } else if l == k + 1 {
            Facet::Triangle(l)
        } else {
            Facet::Covering(k + 1, l)
        })
    }

    pub fn paired_split(&self, n: usize) -> Split {
        let (k, l) = self.cell(n);
        Split::interval(k + 1, l)
    }

    /// Nonzero coefficients of the functional over the coordinates `(i,j)`, `i < j`.
    pub fn coefficients(&self, n: usize) -> Vec<((usize, usize), i64)> {
        let (k, l) = self.cell(n);
        let mut out: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (i, j, c) in [(k, l, 1), (k + 1, l + 1, 1), (k + 1, l, -1), (k, l + 1, -1)] {
            // border entries are constant and the diagonal is zero
            if i >= 1 && j <= n && i < j {
                *out.entry((i, j)).or_insert(0) += c;
            }
        }
        out.into_iter().filter(|(_, c)| *c != 0).collect()
    }

    /// `b·δ`.
    pub fn evaluate(&self, d: &DissimilarityMatrix) -> Rational {
        let n = d.n();
        self.coefficients(n)
            .into_iter()
            .map(|((i, j), c)| d.at(i, j) * Rational::from_integer(c.into()))
            .sum()
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Facet::Left(_) => "left",
            Facet::Right(_) => "right",
            Facet::Triangle(_) => "triangle",
            Facet::Covering(..) => "covering",
        }
    }

    /// The inequality in the form `lhs <= rhs`.
    pub fn inequality(&self, n: usize) -> String {
        let d = |i: usize, j: usize| format!("δ({i},{j})");
        match *self {
            Facet::Left(i) => format!("{} <= {}", d(1, i), d(1, i + 1)),
            Facet::Right(i) => format!("{} <= {}", d(i, n), d(i - 1, n)),
            Facet::Triangle(i) => {
                format!("{} <= {} + {}", d(i - 1, i + 1), d(i - 1, i), d(i, i + 1))
            }
            Facet::Covering(i, j) => format!(
                "{} + {} <= {} + {}",
                d(i, j),
                d(i - 1, j + 1),
                d(i - 1, j),
                d(i, j + 1)
            ),
        }
    }

    pub fn to_json(&self, n: usize) -> serde_json::Value {
        let s = self.paired_split(n);
        let paired = json!([s.lo(), s.hi()]);
        match *self {
            Facet::Covering(i, j) => {
                json!({"kind": self.kind_name(), "i": i, "j": j, "paired_split": paired})
            }
            Facet::Left(i) | Facet::Right(i) | Facet::Triangle(i) => {
                json!({"kind": self.kind_name(), "i": i, "paired_split": paired})
            }
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Facet::Left(i) => write!(f, "Left({i})"),
            Facet::Right(i) => write!(f, "Right({i})"),
            Facet::Triangle(i) => write!(f, "Triangle({i})"),
            Facet::Covering(i, j) => write!(f, "Covering({i},{j})"),
        }
    }
}

/// Facets in the order Left, Right, Triangle, Covering, each lexicographic.
pub fn facets(n: usize) -> Result<Vec<Facet>, ConeError> {
    if n < 3 {
        return Err(ConeError::TooSmall(n));
    }
    Ok(facet_list(n))
}

/// Empty for `n < 3`, where only the end coordinate conditions remain.
pub(crate) fn facet_list(n: usize) -> Vec<Facet> {
    if n < 3 {
        return Vec::new();
    }
    let mut out: Vec<Facet> = (2..n).map(Facet::Left).collect();
    out.extend((2..n).map(Facet::Right));
    out.extend((2..n).map(Facet::Triangle));
    for i in 2..n {
        out.extend((i + 1..n).map(|j| Facet::Covering(i, j)));
    }
    out
}

/// Weights on `KN_n` reproducing `d` under the equidistance condition.
/// Every facet-paired split gets half the facet value; the end leaves get
/// `δ(1,2)/2` and `δ(n-1,n)/2`. Negative entries mean `d` is not in the cone.
pub fn recover_weights(d: &DissimilarityMatrix) -> WeightVector {
    let n = d.n();
    assert!(n >= 2, "weight recovery needs n >= 2");
    let half = Rational::new(1.into(), 2.into());
    let mut w: BTreeMap<Split, Rational> =
        complete_system(n).splits().map(|s| (*s, Rational::zero())).collect();
    for f in facet_list(n) {
        w.insert(f.paired_split(n), f.evaluate(d) * &half);
    }
    w.insert(Split::trivial(1), d.get(1, 2) * &half);
    w.insert(Split::trivial(n), d.get(n - 1, n) * &half);
    WeightVector::from_map_unchecked(w)
}

/// A constraint of the cone description that a point violates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// `b·δ < 0`.
    Facet(Facet),
    /// `δ(i,j) < 0` for an end coordinate.
    Coordinate(usize, usize),
    /// `b·δ != 0` although the paired split is absent from the system.
    NotTight(Facet),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Facet(b) => write!(f, "facet {b} is negative"),
            Violation::Coordinate(i, j) => write!(f, "coordinate δ({i},{j}) is negative"),
            Violation::NotTight(b) => write!(f, "facet {b} is nonzero but its split is absent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Interior,
    /// Smallest face containing the point, as the split system of positive
    /// weights plus all trivial splits.
    OnFace(SplitSystem),
    Outside(Vec<Violation>),
}

impl Membership {
    pub fn is_outside(&self) -> bool {
        matches!(self, Membership::Outside(_))
    }
}

/// Position of `d` relative to the face of the cone given by `sys`.
pub fn membership(d: &DissimilarityMatrix, sys: &SplitSystem) -> Membership {
    let n = d.n();
    assert_eq!(n, sys.n(), "matrix and split system sizes differ");
    let mut violations = Vec::new();
    let mut strict = true;
    for f in facet_list(n) {
        let v = f.evaluate(d);
        if v.is_negative() {
            violations.push(Violation::Facet(f));
        } else if !v.is_zero() && !sys.contains(&f.paired_split(n)) {
            violations.push(Violation::NotTight(f));
        }
        strict &= v.is_positive();
    }
    for (i, j) in [(1, 2), (n - 1, n)] {
        if d.at(i, j).is_negative() {
            violations.push(Violation::Coordinate(i, j));
        }
    }
    if !violations.is_empty() {
        violations.sort();
        violations.dedup();
        return Membership::Outside(violations);
    }
    let face = SplitSystem::with_trivials(
        n,
        recover_weights(d).support().filter(|s| !s.is_trivial()),
    )
    .expect("recovered splits are intervals of KN_n");
    if strict && face.is_complete() {
        Membership::Interior
    } else {
        Membership::OnFace(face)
    }
}

/// Fixed-order set partition of `[n]` into contiguous blocks, stored by its
/// cut points: `c` is a cut when `c` and `c+1` lie in different blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedPartition {
    n: usize,
    cuts: Vec<usize>,
}

impl OrderedPartition {
    /// At least one cut is required: the one-block partition gives the zero vector.
    pub fn from_cuts(n: usize, cuts: impl IntoIterator<Item = usize>) -> Result<Self, ConeError> {
        let cuts: BTreeSet<usize> = cuts.into_iter().collect();
        if let Some(c) = cuts.iter().find(|&&c| c == 0 || c >= n) {
            return Err(ConeError::BadPartition(format!("cut {c} is not in 1..{n}")));
        }
        if cuts.is_empty() {
            return Err(ConeError::BadPartition("a ray needs at least two blocks".into()));
        }
        Ok(OrderedPartition { n, cuts: cuts.into_iter().collect() })
    }

    /// Bit `c-1` set for each cut `c`.
    pub fn from_mask(n: usize, mask: u64) -> Result<Self, ConeError> {
        Self::from_cuts(n, (1..n).filter(|c| mask >> (c - 1) & 1 == 1))
    }

    pub fn mask(&self) -> u64 {
        self.cuts.iter().map(|c| 1u64 << (c - 1)).sum()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// Blocks as inclusive intervals `[b1+1, b2]`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut bounds = vec![0];
        bounds.extend(&self.cuts);
        bounds.push(self.n);
        bounds.windows(2).map(|w| (w[0] + 1, w[1])).collect()
    }

    /// `i` and `j` lie in different blocks.
    pub fn separates(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        self.cuts.iter().any(|&c| a <= c && c < b)
    }
}

impl fmt::Display for OrderedPartition {
    /// `1|23|45`; taxa are comma separated when `n >= 10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n >= 10 { "," } else { "" };
        let blocks: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|(a, b)| (a..=b).map(|t| t.to_string()).collect::<Vec<_>>().join(sep))
            .collect();
        write!(f, "{}", blocks.join("|"))
    }
}

impl FromStr for OrderedPartition {
    type Err = ConeError;

    /// Parses `1|23|45` or `1|2,3|4,5`.
    fn from_str(s: &str) -> Result<Self, ConeError> {
        let bad = |m: &str| ConeError::BadPartition(format!("`{s}`: {m}"));
        let mut next = 1;
        let mut cuts = Vec::new();
        let blocks: Vec<&str> = s.trim().split('|').collect();
        for block in &blocks {
            let taxa: Vec<usize> = if block.contains(',') {
                block
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| bad("not a taxon")))
                    .collect::<Result<_, _>>()?
            } else {
                block
                    .trim()
                    .chars()
                    .map(|c| c.to_digit(10).map(|v| v as usize).ok_or_else(|| bad("not a taxon")))
                    .collect::<Result<_, _>>()?
            };
            if taxa.is_empty() {
                return Err(bad("empty block"));
            }
            for t in taxa {
                if t != next {
                    return Err(bad("blocks must list 1..n in order"));
                }
                next += 1;
            }
            cuts.push(next - 1);
        }
        let n = next - 1;
        cuts.pop();
        Self::from_cuts(n, cuts)
    }
}

/// `r_τ(i,j) = 1` exactly when `i` and `j` lie in different blocks.
pub fn ray_vector(t: &OrderedPartition) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn_unchecked(t.n(), |i, j| {
        if t.separates(i, j) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// All `2^(n-1) - 1` rays, ordered by cut bitmask.
pub fn all_rays(n: usize) -> Vec<OrderedPartition> {
    assert!((2..=63).contains(&n), "ray enumeration supports 2 <= n <= 63");
    (1..1u64 << (n - 1))
        .map(|m| OrderedPartition::from_mask(n, m).expect("nonzero mask"))
        .collect()
}

/// Facets containing `r_τ`, by the combinatorial exclusion rules.
pub fn facet_incidence(t: &OrderedPartition, n: usize) -> BTreeSet<Facet> {
    assert_eq!(t.n(), n, "partition is on a different number of taxa");
    let sep = |i, j| t.separates(i, j);
    facet_list(n)
        .into_iter()
        .filter(|f| {
            let excluded = match *f {
                Facet::Left(i) => sep(i, i + 1) && !sep(1, i),
                Facet::Right(i) => sep(i - 1, i) && !sep(i, n),
                Facet::Triangle(i) => sep(i - 1, i) && sep(i, i + 1),
                Facet::Covering(i, j) => !sep(i, j) && sep(i - 1, i) && sep(j, j + 1),
            };
            !excluded
        })
        .collect()
}

/// Facets containing `r_τ`, by substitution.
pub fn facet_incidence_direct(t: &OrderedPartition) -> BTreeSet<Facet> {
    let r = ray_vector(t);
    facet_list(t.n()).into_iter().filter(|f| f.evaluate(&r).is_zero()).collect()
}

/// Rays of the face of `sys`: every facet whose split is absent must be tight.
pub fn rays_of_face(sys: &SplitSystem) -> Vec<OrderedPartition> {
    let n = sys.n();
    let required: Vec<Facet> =
        facet_list(n).into_iter().filter(|f| !sys.contains(&f.paired_split(n))).collect();
    let by_rules: Vec<OrderedPartition> = all_rays(n)
        .into_par_iter()
        .filter(|t| {
            let on = facet_incidence(t, n);
            required.iter().all(|f| on.contains(f))
        })
        .collect();
    let by_substitution: Vec<OrderedPartition> = all_rays(n)
        .into_par_iter()
        .filter(|t| {
            let r = ray_vector(t);
            required.iter().all(|f| f.evaluate(&r).is_zero())
        })
        .collect();
    assert_eq!(by_rules, by_substitution, "incidence rules disagree with substitution");
    by_rules
}

/// One term `coefficient · r_τ` of a conic decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    pub tau: OrderedPartition,
}

impl Term {
    pub fn to_json(&self) -> serde_json::Value {
        json!({"coeff": rational::to_json(&self.coefficient), "tau": self.tau.to_string(), "cuts": self.tau.cuts()})
    }
}

/// Greedy peeling: take the ray given by the X-diagram of the current point,
/// subtract the largest multiple that stays in the cone, repeat until zero.
pub fn decompose(d: &DissimilarityMatrix) -> Result<Vec<Term>, ConeError> {
    let n = d.n();
    if n < 2 {
        return Err(ConeError::TooSmall(n));
    }
    if let Membership::Outside(v) = membership(d, &complete_system(n)) {
        let list: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(ConeError::NotInCone(list.join("; ")));
    }
    let facets = facet_list(n);
    let max_terms = n * (n - 1) / 2 + 2;
    let mut rest = d.clone();
    let mut terms = Vec::new();
    while !rest.is_zero() {
        assert!(terms.len() < max_terms, "decomposition did not terminate");
        let x = xdiagram::xdiagram_of(&rest);
        let tau = xdiagram::ray_for_tight_set(&x)
            .expect("the diagram of a cone point is valid")
            .expect("a nonzero cone point has a non-tight facet");
        let r = ray_vector(&tau);
        let mut lambda: Option<Rational> = None;
        let mut take = |q: Rational| {
            if lambda.as_ref().map_or(true, |l| q < *l) {
                lambda = Some(q);
            }
        };
        for f in &facets {
            let br = f.evaluate(&r);
            if br.is_positive() {
                take(f.evaluate(&rest) / br);
            }
        }
        for (i, j, v) in r.entries() {
            if v.is_one() {
                take(rest.at(i, j).clone());
            }
        }
        let lambda = lambda.expect("a ray has a separated pair");
        assert!(lambda.is_positive(), "zero step in decomposition");
        rest = rest.add_scaled(&r, &-lambda.clone());
        terms.push(Term { coefficient: lambda, tau });
    }
    Ok(terms)
}

/// `Σ λ_k r_{τ_k}`.
pub fn resum(n: usize, terms: &[Term]) -> DissimilarityMatrix {
    terms
        .iter()
        .fold(DissimilarityMatrix::zero(n), |acc, t| acc.add_scaled(&ray_vector(&t.tau), &t.coefficient))
}
