//! Exact rank of small rational matrices.

use num_traits::Zero;

use crate::rational::Rational;

/// Rank by Gaussian elimination over the rationals; rows may be ragged only
/// if all have the same length.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let factor = &m[r][c] / &pivot;
            for k in c..cols {
                let delta = &factor * &m[rank][k];
                m[r][k] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&mat(&[&[0, 1], &[1, 0], &[1, 1]])), 2);
        assert_eq!(rank(&mat(&[&[0, 0, 0]])), 0);
        assert_eq!(rank(&[]), 0);
    }
}
