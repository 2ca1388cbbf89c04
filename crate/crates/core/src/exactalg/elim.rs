//! Fraction-free (Bareiss) elimination.
//!
//! Rational inputs are scaled row by row to integers, which changes neither
//! the rank nor the solution set; elimination then runs over an integer
//! type `T` where every division is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{ExactMatrix, Rational};

/// Rank of an integer matrix given as rows. Rows are consumed as scratch.
///
/// Pivot selection takes the first nonzero entry in the pivot column.
pub fn bareiss_rank<T: Integer + Clone>(mut rows: Vec<Vec<T>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut prev = T::one();
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..ncols {
                let v = pivot.clone() * row[j].clone() - factor.clone() * pivot_row[j].clone();
                row[j] = v / prev.clone();
            }
            row[col] = T::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Solves `M y = b` for square integer `M`.
///
/// Returns `(d, w)` with `y = w / d` and `d = ±det(M) ≠ 0`, or `None`
/// when `M` is singular. All entries of `w` are integers (Cramer).
pub fn bareiss_solve<T: Integer + Clone>(m: &[Vec<T>], b: &[T]) -> Option<(T, Vec<T>)> {
    let n = m.len();
    assert_eq!(b.len(), n);
    let mut a: Vec<Vec<T>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut prev = T::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, p);
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        let pivot = pivot_row[k].clone();
        for row in tail.iter_mut() {
            let factor = row[k].clone();
            for j in k + 1..=n {
                let v = pivot.clone() * row[j].clone() - factor.clone() * pivot_row[j].clone();
                row[j] = v / prev.clone();
            }
            row[k] = T::zero();
        }
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    // Back substitution on the scaled unknowns w = det * y, all integral.
    let mut w: Vec<T> = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = det.clone() * a[i][n].clone();
        for j in i + 1..n {
            acc = acc - a[i][j].clone() * w[j].clone();
        }
        w[i] = acc / a[i][i].clone();
    }
    Some((det, w))
}

/// Scales a row of rationals by the lcm of its denominators.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
}

/// Exact rank over the rationals.
pub fn rank(m: &ExactMatrix) -> usize {
    let rows = (0..m.rows()).map(|i| integer_row(m.row(i))).collect();
    bareiss_rank::<BigInt>(rows)
}

/// Result of [`solve_linear`]; a singular system is a value, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Singular,
}

impl Solution {
    pub fn unique(self) -> Option<Vec<Rational>> {
        match self {
            Solution::Unique(v) => Some(v),
            Solution::Singular => None,
        }
    }
}

/// Solves `M x = b` exactly for square `M`.
pub fn solve_linear(m: &ExactMatrix, b: &[Rational]) -> Solution {
    assert!(m.is_square(), "solve_linear needs a square matrix");
    assert_eq!(m.rows(), b.len(), "right-hand side length");
    if m.rows() == 0 {
        return Solution::Unique(Vec::new());
    }
    // Scale each equation (row together with its rhs) to integers.
    let mut rows = Vec::with_capacity(m.rows());
    let mut rhs = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut r: Vec<Rational> = m.row(i).to_vec();
        r.push(b[i].clone());
        let mut ints = integer_row(&r);
        rhs.push(ints.pop().unwrap());
        rows.push(ints);
    }
    match bareiss_solve::<BigInt>(&rows, &rhs) {
        Some((det, w)) => Solution::Unique(w.into_iter().map(|wi| Rational::new(wi, det.clone())).collect()),
        None => Solution::Singular,
    }
}
