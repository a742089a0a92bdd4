//! Exact rank computations.
//!
//! [`rank`] is fraction-free (Bareiss) elimination over big integers.
//! [`ModularBasis`] is a fast filter: rows independent modulo a prime are
//! independent over the rationals, so it can pick a basis from a large stream
//! of points before the exact check runs on the few rows it kept.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

/// Rank of an integer matrix by fraction-free Gaussian elimination with
/// partial pivoting on the largest absolute value.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        let pivot = (r..m)
            .filter(|&i| !a[i][c].is_zero())
            .max_by(|&x, &y| a[x][c].abs().cmp(&a[y][c].abs()).then(y.cmp(&x)));
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    rank(&big)
}

/// Rank of a rational matrix; each row is cleared of denominators first.
pub fn rank_rational(rows: &[Vec<Rational>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
            r.iter()
                .map(|x| BigInt::from(*x.numer()) * BigInt::from(l / x.denom()))
                .collect()
        })
        .collect();
    rank(&big)
}

/// Dimension of the affine hull of a set of points.
pub fn affine_rank(points: &[Vec<Rational>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(x, y)| x - y).collect())
        .collect();
    rank_rational(&diffs)
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    r
}

fn reduce(x: i64) -> u64 {
    x.rem_euclid(PRIME as i64) as u64
}

/// Incremental row-echelon basis modulo `2^61 - 1`.
#[derive(Clone, Debug, Default)]
pub struct ModularBasis {
    rows: Vec<(usize, Vec<u64>)>,
    kept: Vec<Vec<i64>>,
}

impl ModularBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The original integer rows that entered the basis.
    pub fn kept(&self) -> &[Vec<i64>] {
        &self.kept
    }

    /// Adds `v` if it is independent of the current basis mod p.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|&x| reduce(x)).collect();
        for (pc, row) in &self.rows {
            let f = w[*pc];
            if f != 0 {
                for (x, y) in w.iter_mut().zip(row) {
                    *x = (*x + PRIME - mulmod(f, *y)) % PRIME;
                }
            }
        }
        let Some(pc) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = powmod(w[pc], PRIME - 2);
        for x in w.iter_mut() {
            *x = mulmod(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[pc];
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&w) {
                    *x = (*x + PRIME - mulmod(f, *y)) % PRIME;
                }
            }
        }
        self.rows.push((pc, w));
        self.kept.push(v.to_vec());
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain Gaussian elimination over rationals.
    fn rank_oracle(rows: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        let cols = a.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c] / a[r][c];
                    for j in 0..cols {
                        let t = a[r][j] * f;
                        a[i][j] -= t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank_i64(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_i64(&[vec![1, 2], vec![2, 5]]), 2);
        assert_eq!(rank_i64(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank_i64(&[]), 0);
        assert_eq!(rank_i64(&[vec![0, 1, 1], vec![0, 2, 2], vec![1, 0, 0]]), 2);
    }

    #[test]
    fn affine_rank_of_simplex() {
        let pts: Vec<Vec<Rational>> =
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]
                .into_iter()
                .map(|r| r.into_iter().map(Rational::from_integer).collect())
                .collect();
        assert_eq!(affine_rank(&pts), 2);
    }

    proptest! {
        #[test]
        fn bareiss_matches_rational_elimination(
            rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 6), 0..9)
        ) {
            prop_assert_eq!(rank_i64(&rows), rank_oracle(&rows));
        }

        #[test]
        fn modular_basis_agrees_on_small_entries(
            rows in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 5), 0..8)
        ) {
            let mut b = ModularBasis::new();
            for r in &rows {
                b.insert(r);
            }
            prop_assert_eq!(b.rank(), rank_oracle(&rows));
            prop_assert_eq!(rank_i64(b.kept()), b.rank());
        }
    }
}
