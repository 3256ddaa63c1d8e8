//! The Chan-Robbins-Yuen polytope `CRY_n`, the truncated cone
//! `PEDC_n = EDC_{KN_n} ∩ {δ(1,n) <= 1}`, the affine maps between them and
//! small-scale lattice point counting.
//!
//! `φ(x)(k,l) = 1 - Σ_{i<=k, j>=l} x(i,j)` for `1 <= k < l <= n`.
//!
//! `ψ` puts into `x(k+1,l)` the value of the bordered cell functional
//! `δ̃(k,l) + δ̃(k+1,l+1) - δ̃(k+1,l) - δ̃(k,l+1)` (border `1`, diagonal `0`)
//! for `0 <= k < l <= n`, and `1 - δ(i,i+1)` into the subdiagonal. Spelled out:
//!
//! | entry | value |
//! |---|---|
//! | `x(1,n)` | `1 - δ(1,n)` |
//! | `x(1,j)`, `2 <= j <= n-1` | `δ(1,j+1) - δ(1,j)` |
//! | `x(i,n)`, `2 <= i <= n-1` | `δ(i-1,n) - δ(i,n)` |
//! | `x(1,1)` | `δ(1,2)` |
//! | `x(n,n)` | `δ(n-1,n)` |
//! | `x(i,j)`, `2 <= i < j <= n-1` | `δ(i-1,j) + δ(i,j+1) - δ(i,j) - δ(i-1,j+1)` |
//! | `x(i,i)`, `2 <= i <= n-1` | `δ(i-1,i) + δ(i,i+1) - δ(i-1,i+1)` |
//! | `x(i+1,i)` | `1 - δ(i,i+1)` |
//! | every other entry | `0` |

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::cone::{self, ray_vector, Membership, OrderedPartition};
use crate::linalg;
use crate::metric::DissimilarityMatrix;
use crate::rational::Rational;
use crate::split::complete_system;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryError {
    #[error("not a point of CRY_{n}: {reason}")]
    NotInCry { n: usize, reason: String },
    #[error("not a point of PEDC_{n}: {reason}")]
    NotInPolytope { n: usize, reason: String },
    #[error("{what} is limited to {limit}, got {got}")]
    TooLarge { what: &'static str, limit: usize, got: usize },
    #[error("the polytopes need n >= 2, got {0}")]
    TooSmall(usize),
}

/// Largest `n` for lattice counting and volumes.
pub const MAX_COUNT_N: usize = 5;

/// Dilations up to `max(C(n,2), MIN_DILATION_LIMIT)` are counted.
pub const MIN_DILATION_LIMIT: usize = 4;

/// Doubly stochastic `n × n` matrix vanishing below the first subdiagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CryMatrix {
    n: usize,
    x: Vec<Vec<Rational>>,
}

impl CryMatrix {
    /// Rows of the matrix, 0-based storage of the 1-based `x(i,j)`.
    pub fn new(x: Vec<Vec<Rational>>) -> Result<Self, CryError> {
        let n = x.len();
        let bad = |reason: String| CryError::NotInCry { n, reason };
        if n < 2 {
            return Err(CryError::TooSmall(n));
        }
        if let Some(i) = x.iter().position(|r| r.len() != n) {
            return Err(bad(format!("row {} has {} entries", i + 1, x[i].len())));
        }
        for i in 0..n {
            for j in 0..n {
                if x[i][j].is_negative() {
                    return Err(bad(format!("x({},{}) is negative", i + 1, j + 1)));
                }
                if i > j + 1 && !x[i][j].is_zero() {
                    return Err(bad(format!("x({},{}) lies below the subdiagonal", i + 1, j + 1)));
                }
            }
            let row: Rational = x[i].iter().sum();
            if !row.is_one() {
                return Err(bad(format!("row {} sums to {row}", i + 1)));
            }
            let col: Rational = x.iter().map(|r| &r[i]).sum();
            if !col.is_one() {
                return Err(bad(format!("column {} sums to {col}", i + 1)));
            }
        }
        Ok(CryMatrix { n, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `x(i,j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.x[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.x
    }

    /// Convex combination `Σ c_k m_k`; the coefficients must be nonnegative and sum to one.
    pub fn convex_combination(parts: &[(Rational, CryMatrix)]) -> Result<Self, CryError> {
        let n = parts.first().map_or(0, |(_, m)| m.n);
        let mut x = vec![vec![Rational::zero(); n]; n];
        for (c, m) in parts {
            for i in 0..n {
                for j in 0..n {
                    x[i][j] += c * &m.x[i][j];
                }
            }
        }
        Self::new(x)
    }
}

/// A point of `PEDC_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PedcPoint {
    d: DissimilarityMatrix,
}

impl PedcPoint {
    pub fn new(d: DissimilarityMatrix) -> Result<Self, CryError> {
        let n = d.n();
        if n < 2 {
            return Err(CryError::TooSmall(n));
        }
        if let Membership::Outside(v) = cone::membership(&d, &complete_system(n)) {
            let reasons: Vec<String> = v.iter().map(ToString::to_string).collect();
            return Err(CryError::NotInPolytope { n, reason: reasons.join("; ") });
        }
        if d.get(1, n) > Rational::one() {
            return Err(CryError::NotInPolytope { n, reason: format!("δ(1,{n}) exceeds 1") });
        }
        Ok(PedcPoint { d })
    }

    pub fn matrix(&self) -> &DissimilarityMatrix {
        &self.d
    }

    pub fn into_matrix(self) -> DissimilarityMatrix {
        self.d
    }
}

pub fn phi(x: &CryMatrix) -> PedcPoint {
    let n = x.n;
    // prefix[k][l] = Σ_{i<=k, j>=l} x(i,j)
    let mut prefix = vec![vec![Rational::zero(); n + 2]; n + 1];
    for k in 1..=n {
        for l in (1..=n).rev() {
            prefix[k][l] = &prefix[k - 1][l] + &prefix[k][l + 1] - &prefix[k - 1][l + 1]
                + x.get(k, l);
        }
    }
    let d = DissimilarityMatrix::from_fn_unchecked(n, |k, l| Rational::one() - &prefix[k][l]);
    PedcPoint { d }
}

pub fn psi(p: &PedcPoint) -> CryMatrix {
    let d = &p.d;
    let n = d.n();
    let t = |i: usize, j: usize| -> Rational {
        if i == 0 || j == n + 1 {
            Rational::one()
        } else if i == j {
            Rational::zero()
        } else {
            d.get(i, j)
        }
    };
    let mut x = vec![vec![Rational::zero(); n]; n];
    for k in 0..n {
        for l in k + 1..=n {
            x[k][l - 1] = t(k, l) + t(k + 1, l + 1) - t(k + 1, l) - t(k, l + 1);
        }
    }
    for i in 1..n {
        x[i][i - 1] = Rational::one() - d.get(i, i + 1);
    }
    CryMatrix { n, x }
}

/// Convenience wrapper validating `d` first.
pub fn psi_of(d: &DissimilarityMatrix) -> Result<CryMatrix, CryError> {
    PedcPoint::new(d.clone()).map(|p| psi(&p))
}

/// Permutation matrix with one block per block of `blocks`: a `1` on the
/// diagonal for singletons, otherwise ones on the block's subdiagonal and
/// in its upper right corner.
pub fn vertex_for_blocks(n: usize, blocks: &[(usize, usize)]) -> CryMatrix {
    let mut x = vec![vec![Rational::zero(); n]; n];
    for &(a, b) in blocks {
        if a == b {
            x[a - 1][a - 1] = Rational::one();
        } else {
            x[a - 1][b - 1] = Rational::one();
            for i in a..b {
                x[i][i - 1] = Rational::one();
            }
        }
    }
    CryMatrix { n, x }
}

/// Vertex whose block structure is that of `τ`; `None` is the single block.
pub fn vertex_for(n: usize, tau: Option<&OrderedPartition>) -> CryMatrix {
    match tau {
        Some(t) => vertex_for_blocks(n, &t.blocks()),
        None => vertex_for_blocks(n, &[(1, n)]),
    }
}

/// All `2^(n-1)` vertices, indexed by the bitmask of block boundaries; entry
/// `0` is the single `n`-cycle block.
pub fn cry_vertices(n: usize) -> Vec<CryMatrix> {
    assert!((2..=63).contains(&n), "vertex enumeration supports 2 <= n <= 63");
    std::iter::once(vertex_for(n, None))
        .chain(cone::all_rays(n).iter().map(|t| vertex_for(n, Some(t))))
        .collect()
}

/// The origin followed by every `r_τ`, in the same order as [`cry_vertices`].
pub fn pedc_vertices(n: usize) -> Vec<PedcPoint> {
    assert!((2..=63).contains(&n), "vertex enumeration supports 2 <= n <= 63");
    std::iter::once(DissimilarityMatrix::zero(n))
        .chain(cone::all_rays(n).iter().map(ray_vector))
        .map(|d| PedcPoint { d })
        .collect()
}

/// `C(n,2)`, the dimension of `PEDC_n` once [`is_full_dimensional`] holds.
pub fn dimension(n: usize) -> usize {
    n * (n - 1) / 2
}

/// The vertex vectors of `PEDC_n` span `R^{C(n,2)}`.
pub fn is_full_dimensional(n: usize) -> bool {
    let rows: Vec<Vec<Rational>> =
        pedc_vertices(n).into_iter().map(|p| p.d.upper().to_vec()).collect();
    linalg::rank(&rows) == dimension(n)
}

fn check_count_args(n: usize, t: usize) -> Result<(), CryError> {
    if n < 2 {
        return Err(CryError::TooSmall(n));
    }
    if n > MAX_COUNT_N {
        return Err(CryError::TooLarge { what: "n", limit: MAX_COUNT_N, got: n });
    }
    let limit = dimension(n).max(MIN_DILATION_LIMIT);
    if t > limit {
        return Err(CryError::TooLarge { what: "dilation", limit, got: t });
    }
    Ok(())
}

/// Integer points of `t·PEDC_n`, by depth-first search over the box
/// `[0,t]^{C(n,2)}`. Coordinates are assigned longest interval first and
/// each inequality is tested as soon as all its coordinates are known.
pub fn count_pedc_points(n: usize, t: usize) -> Result<u64, CryError> {
    check_count_args(n, t)?;
    let mut coords: Vec<(usize, usize)> =
        (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    coords.sort_by_key(|&(i, j)| (std::cmp::Reverse(j - i), i));
    let pos: HashMap<(usize, usize), usize> =
        coords.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    // constraints as integer rows: Σ c·δ >= 0, attached to their last coordinate
    let mut checks: Vec<Vec<Vec<(usize, i64)>>> = vec![Vec::new(); coords.len()];
    for f in cone::facet_list(n) {
        let row: Vec<(usize, i64)> =
            f.coefficients(n).into_iter().map(|(c, v)| (pos[&c], v)).collect();
        let last = row.iter().map(|(p, _)| *p).max().expect("facets are nonzero");
        checks[last].push(row);
    }
    let t = t as i64;
    // δ(1,n) <= t is the box bound of the first coordinate; δ >= 0 is the box itself
    let start = pos[&(1, n)];
    debug_assert_eq!(start, 0);

    fn dfs(p: usize, values: &mut Vec<i64>, t: i64, checks: &[Vec<Vec<(usize, i64)>>]) -> u64 {
        if p == values.len() {
            return 1;
        }
        let mut total = 0;
        for v in 0..=t {
            values[p] = v;
            let ok = checks[p]
                .iter()
                .all(|row| row.iter().map(|&(q, c)| c * values[q]).sum::<i64>() >= 0);
            if ok {
                total += dfs(p + 1, values, t, checks);
            }
        }
        total
    }

    let m = coords.len();
    Ok((0..=t)
        .into_par_iter()
        .map(|v0| {
            let mut values = vec![0i64; m];
            values[0] = v0;
            let ok = checks[0]
                .iter()
                .all(|row| row.iter().map(|&(q, c)| c * values[q]).sum::<i64>() >= 0);
            if ok {
                dfs(1, &mut values, t, &checks)
            } else {
                0
            }
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum())
}

/// Integer points of `t·CRY_n`: nonnegative integer matrices with all row
/// and column sums `t` and zeros below the subdiagonal. Rows are filled top
/// to bottom; the state is the vector of remaining column capacities.
pub fn count_cry_points(n: usize, t: usize) -> Result<u64, CryError> {
    check_count_args(n, t)?;

    fn fill(
        row: usize,
        n: usize,
        t: usize,
        cap: Vec<usize>,
        memo: &mut HashMap<(usize, Vec<usize>), u64>,
    ) -> u64 {
        if row == n {
            return u64::from(cap.iter().all(|&c| c == 0));
        }
        if let Some(&v) = memo.get(&(row, cap.clone())) {
            return v;
        }
        // row `row` (0-based) may use columns row-1 ..= n-1
        let first = row.saturating_sub(1);
        let mut total = 0;
        let mut current = cap.clone();
        distribute(first, n, t, &mut current, &mut |c: &Vec<usize>| {
            // column row-1 receives nothing from later rows
            if row >= 1 && c[row - 1] != 0 {
                return;
            }
            total += fill(row + 1, n, t, c.clone(), memo);
        });
        memo.insert((row, cap), total);
        total
    }

    fn distribute(
        col: usize,
        n: usize,
        left: usize,
        cap: &mut Vec<usize>,
        visit: &mut dyn FnMut(&Vec<usize>),
    ) {
        if col == n {
            if left == 0 {
                visit(cap);
            }
            return;
        }
        let max = left.min(cap[col]);
        for v in 0..=max {
            cap[col] -= v;
            distribute(col + 1, n, left - v, cap, visit);
            cap[col] += v;
        }
    }

    let mut memo = HashMap::new();
    Ok(fill(0, n, t, vec![t; n], &mut memo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeCounts {
    pub pedc: u64,
    pub cry: u64,
}

/// Both counts; the affine isomorphism makes them equal.
pub fn count_lattice_points(n: usize, t: usize) -> Result<LatticeCounts, CryError> {
    Ok(LatticeCounts { pedc: count_pedc_points(n, t)?, cry: count_cry_points(n, t)? })
}

/// Coefficients `c_0, …, c_d` of the Ehrhart polynomial of `PEDC_n`,
/// interpolated exactly from the counts at `t = 0..=d`, `d = C(n,2)`.
pub fn ehrhart_polynomial(n: usize) -> Result<Vec<Rational>, CryError> {
    check_count_args(n, 0)?;
    let d = dimension(n);
    let values: Vec<Rational> = (0..=d)
        .map(|t| count_pedc_points(n, t).map(|c| Rational::from_integer(BigInt::from(c))))
        .collect::<Result<_, _>>()?;
    Ok(interpolate(&values))
}

/// Monomial coefficients of the polynomial of degree `< values.len()` taking
/// `values[t]` at `t = 0, 1, …`.
fn interpolate(values: &[Rational]) -> Vec<Rational> {
    let m = values.len();
    let mut coeffs = vec![Rational::zero(); m];
    for (k, yk) in values.iter().enumerate() {
        // basis polynomial Π_{j != k} (t - j) / (k - j)
        let mut basis = vec![Rational::one()];
        let mut denom = Rational::one();
        for j in (0..m).filter(|&j| j != k) {
            let mut next = vec![Rational::zero(); basis.len() + 1];
            for (p, c) in basis.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= c * Rational::from_integer(BigInt::from(j));
            }
            basis = next;
            denom *= Rational::from_integer(BigInt::from(k as i64 - j as i64));
        }
        for (p, c) in basis.iter().enumerate() {
            coeffs[p] += yk * c / &denom;
        }
    }
    coeffs
}

/// `d!` times the leading Ehrhart coefficient, `d = C(n,2)`.
pub fn normalized_volume(n: usize) -> Result<Rational, CryError> {
    check_count_args(n, 0)?;
    assert!(is_full_dimensional(n), "PEDC_{n} is not full-dimensional");
    let d = dimension(n);
    let poly = ehrhart_polynomial(n)?;
    let factorial: BigInt = (1..=d).map(BigInt::from).product();
    Ok(&poly[d] * Rational::from_integer(factorial))
}

/// `Π_{i=1}^{n-2} Cat(i)`.
pub fn catalan_product(n: usize) -> BigInt {
    (1..=n.saturating_sub(2))
        .map(|i| {
            let binom: BigInt = (0..i).fold(BigInt::one(), |acc, k| acc * (2 * i - k) / (k + 1));
            binom / (i + 1)
        })
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn validation() {
        assert!(CryMatrix::new(ints(&[&[1, 0], &[0, 1]])).is_ok());
        assert!(CryMatrix::new(ints(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]])).is_ok());
        assert!(CryMatrix::new(ints(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]])).is_ok());
        // x(3,1) below the subdiagonal
        assert!(CryMatrix::new(ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]])).is_err());
        assert!(CryMatrix::new(ints(&[&[1, 1], &[0, 0]])).is_err());
    }

    #[test]
    fn identity_and_cycle() {
        for n in 2..=6 {
            let id = vertex_for_blocks(n, &(1..=n).map(|i| (i, i)).collect::<Vec<_>>());
            assert!(phi(&id).matrix().entries().all(|(_, _, v)| v.is_one()));
            let cycle = vertex_for(n, None);
            assert!(phi(&cycle).matrix().is_zero());
            assert_eq!(psi(&phi(&id)), id);
            assert_eq!(psi_of(&DissimilarityMatrix::zero(n)).unwrap(), cycle);
        }
    }

    #[test]
    fn vertex_counts_and_validity() {
        assert_eq!(cry_vertices(3).len(), 4);
        for v in cry_vertices(4) {
            CryMatrix::new(v.rows().to_vec()).unwrap();
        }
        assert_eq!(cry_vertices(4).len(), 8);
        assert_eq!(pedc_vertices(5).len(), 16);
        assert_eq!(pedc_vertices(6).len(), 32);
        let two = pedc_vertices(2);
        assert!(two[0].matrix().is_zero());
        assert_eq!(two[1].matrix().get(1, 2), int(1));
    }

    #[test]
    fn vertices_correspond() {
        for n in 2..=7 {
            for (x, p) in cry_vertices(n).iter().zip(pedc_vertices(n)) {
                assert_eq!(phi(x), p);
                assert_eq!(&psi(&p), x);
            }
        }
    }

    #[test]
    fn pedc_rejects_outside_points() {
        let big = DissimilarityMatrix::from_fn(3, |_, _| int(2)).unwrap();
        assert!(matches!(psi_of(&big), Err(CryError::NotInPolytope { .. })));
        let skew = DissimilarityMatrix::new(3, vec![int(1), int(0), int(0)]).unwrap();
        assert!(psi_of(&skew).is_err());
    }

    #[test]
    fn convex_points_round_trip() {
        let v = cry_vertices(4);
        let parts = vec![(ratio(1, 2), v[1].clone()), (ratio(1, 3), v[6].clone()), (ratio(1, 6), v[0].clone())];
        let x = CryMatrix::convex_combination(&parts).unwrap();
        assert_eq!(psi(&phi(&x)), x);
    }

    #[test]
    fn small_counts_agree() {
        for n in 2..=4 {
            for t in 0..=3 {
                let c = count_lattice_points(n, t).unwrap();
                assert_eq!(c.pedc, c.cry, "n={n} t={t}");
            }
        }
        assert_eq!(count_lattice_points(3, 0).unwrap(), LatticeCounts { pedc: 1, cry: 1 });
        // CRY_3 at t = 1 has its 4 vertices as only lattice points
        assert_eq!(count_cry_points(3, 1).unwrap(), 4);
    }

    #[test]
    fn count_limits() {
        assert!(matches!(count_pedc_points(6, 1), Err(CryError::TooLarge { .. })));
        assert!(matches!(count_cry_points(3, 5), Err(CryError::TooLarge { .. })));
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        // 1 + 2t + 3t^2 at t = 0, 1, 2
        let p = interpolate(&[int(1), int(6), int(17)]);
        assert_eq!(p, vec![int(1), int(2), int(3)]);
    }

    #[test]
    fn catalan_products() {
        let got: Vec<BigInt> = (2..=7).map(catalan_product).collect();
        let want: Vec<BigInt> = [1, 1, 2, 10, 140, 5880].into_iter().map(BigInt::from).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn small_volumes() {
        assert_eq!(normalized_volume(3).unwrap(), int(1));
        assert_eq!(normalized_volume(4).unwrap(), int(2));
    }
}
