//! Slow, direct reference computations. Nothing here shares code with the
//! crate under test: splits are plain taxon sets, matrices are dense
//! vectors indexed by pairs, and polyhedral questions are answered by
//! exhaustive subset search with exact elimination.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Coordinates `(i,j)`, `1 <= i < j <= n`, row by row.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
        }
    }
    out
}

pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    pairs(n).iter().position(|&p| p == (i, j)).expect("valid pair")
}

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for k in 0..m.len() {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for cc in 0..cols {
                    let t = &f * &m[r][cc];
                    m[k][cc] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : row·x = 0 for all rows}` in dimension `d`.
pub fn null_space(rows: &[Vec<Q>], d: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Q::zero(); d];
            v[fc] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            v
        })
        .collect()
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales so the first nonzero entry has absolute value 1.
pub fn normalize(v: &[Q]) -> Vec<Q> {
    let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero vector").abs();
    v.iter().map(|x| x / &lead).collect()
}

fn subsets(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for x in start..m {
            if m - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, m, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), &mut visit);
}

/// Extreme rays of the pointed cone `{x : a·x >= 0 for a in ineqs}` in
/// dimension `d`, each normalized, found by trying every `d-1` subset of
/// inequalities as the tight set.
pub fn rays_from_inequalities(ineqs: &[Vec<Q>], d: usize) -> BTreeSet<Vec<Q>> {
    let mut out = BTreeSet::new();
    subsets(ineqs.len(), d - 1, |idx| {
        let rows: Vec<Vec<Q>> = idx.iter().map(|&k| ineqs[k].clone()).collect();
        let ns = null_space(&rows, d);
        if ns.len() != 1 {
            return;
        }
        for sign in [1, -1] {
            let v: Vec<Q> = ns[0].iter().map(|x| x * q(sign)).collect();
            if ineqs.iter().all(|a| !dot(a, &v).is_negative()) {
                out.insert(normalize(&v));
            }
        }
    });
    out
}

/// Facet normals of the cone generated by `rays` in dimension `d`, oriented
/// to be nonnegative on every ray and normalized; requires a full-dimensional cone.
pub fn facets_from_rays(rays: &[Vec<Q>], d: usize) -> BTreeSet<Vec<Q>> {
    let mut out = BTreeSet::new();
    subsets(rays.len(), d - 1, |idx| {
        let rows: Vec<Vec<Q>> = idx.iter().map(|&k| rays[k].clone()).collect();
        let ns = null_space(&rows, d);
        if ns.len() != 1 {
            return;
        }
        let a = &ns[0];
        let signs: Vec<Q> = rays.iter().map(|r| dot(a, r)).collect();
        if signs.iter().all(|s| !s.is_negative()) {
            out.insert(normalize(a));
        } else if signs.iter().all(|s| !s.is_positive()) {
            out.insert(normalize(&a.iter().map(|x| -x).collect::<Vec<_>>()));
        }
    });
    out
}

/// All fixed-order set partitions of `1..=n` with at least two blocks.
pub fn compositions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(start: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if start > n {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for end in start..=n {
            cur.push((start..=end).collect());
            rec(end + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, &mut Vec::new(), &mut out);
    out
}

/// `1` on pairs in different blocks, row by row over [`pairs`].
pub fn partition_vector(n: usize, blocks: &[Vec<usize>]) -> Vec<Q> {
    let block_of = |t: usize| blocks.iter().position(|b| b.contains(&t)).expect("covering partition");
    pairs(n).into_iter().map(|(i, j)| if block_of(i) == block_of(j) { q(0) } else { q(1) }).collect()
}

/// Splits as the set of taxa not containing the root `0`; distances add the
/// weights of splits with exactly one of `i`, `j` inside.
pub fn split_distance(splits: &[(BTreeSet<usize>, Q)], i: usize, j: usize) -> Q {
    splits
        .iter()
        .filter(|(side, _)| side.contains(&i) != side.contains(&j))
        .map(|(_, w)| w.clone())
        .sum()
}

/// Every contiguous interval of `1..=n` except `1..=n` itself.
pub fn complete_intervals(n: usize) -> Vec<BTreeSet<usize>> {
    let mut out = Vec::new();
    for lo in 1..=n {
        for hi in lo..=n {
            if (lo, hi) != (1, n) {
                out.push((lo..=hi).collect());
            }
        }
    }
    out
}

/// First quadruple `i<j<k<l` (lexicographic) whose two largest pair sums
/// differ, with its sums `(ij+kl, ik+jl, il+jk)`.
pub fn first_four_point_violation(n: usize, d: &dyn Fn(usize, usize) -> Q) -> Option<([usize; 4], [Q; 3])> {
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let sums = [d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k)];
                    let mut sorted = sums.clone();
                    sorted.sort();
                    if sorted[1] != sorted[2] {
                        return Some(([i, j, k, l], sums));
                    }
                }
            }
        }
    }
    None
}

/// First quadruple `i<j<k<l` violating `max(ij+kl, il+jk) <= ik+jl`.
pub fn first_kalmanson_violation(n: usize, d: &dyn Fn(usize, usize) -> Q) -> Option<[usize; 4]> {
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let cross = d(i, k) + d(j, l);
                    if d(i, j) + d(k, l) > cross || d(i, l) + d(j, k) > cross {
                        return Some([i, j, k, l]);
                    }
                }
            }
        }
    }
    None
}

/// All-pairs shortest path lengths by Floyd–Warshall.
pub fn all_pairs_shortest(vertices: usize, edges: &[(usize, usize, Q)]) -> Vec<Vec<Option<Q>>> {
    let mut d: Vec<Vec<Option<Q>>> = vec![vec![None; vertices]; vertices];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(q(0));
    }
    for (u, v, w) in edges {
        for (a, b) in [(*u, *v), (*v, *u)] {
            if d[a][b].as_ref().map_or(true, |x| w < x) {
                d[a][b] = Some(w.clone());
            }
        }
    }
    for k in 0..vertices {
        for a in 0..vertices {
            let Some(ak) = d[a][k].clone() else { continue };
            for b in 0..vertices {
                if let Some(kb) = d[k][b].clone() {
                    let through = &ak + &kb;
                    if d[a][b].as_ref().map_or(true, |x| through < *x) {
                        d[a][b] = Some(through);
                    }
                }
            }
        }
    }
    d
}

pub fn catalan(k: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(2 * (2 * i + 1)) / BigInt::from(i + 2);
    }
    c
}

/// Integer `n x n` matrices with row and column sums `t` and zeros below the
/// first subdiagonal, by enumerating every row as a composition of `t`.
pub fn count_cry_matrices(n: usize, t: u64) -> u64 {
    fn compositions_into(slots: usize, t: u64) -> Vec<Vec<u64>> {
        if slots == 1 {
            return vec![vec![t]];
        }
        let mut out = Vec::new();
        for first in 0..=t {
            for mut rest in compositions_into(slots - 1, t - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    fn rec(row: usize, n: usize, t: u64, cols: &mut Vec<u64>) -> u64 {
        if row > n {
            return u64::from(cols.iter().all(|&c| c == t));
        }
        let first = if row >= 2 { row - 1 } else { 1 };
        let mut total = 0;
        for comp in compositions_into(n - first + 1, t) {
            let ok = comp.iter().enumerate().all(|(k, &v)| cols[first - 1 + k] + v <= t);
            if !ok {
                continue;
            }
            for (k, &v) in comp.iter().enumerate() {
                cols[first - 1 + k] += v;
            }
            total += rec(row + 1, n, t, cols);
            for (k, &v) in comp.iter().enumerate() {
                cols[first - 1 + k] -= v;
            }
        }
        total
    }
    rec(1, n, t, &mut vec![0; n])
}
