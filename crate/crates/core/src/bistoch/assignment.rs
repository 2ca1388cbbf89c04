//! Maximum-weight perfect assignment (Hungarian method with potentials).
//!
//! Generic over the scalar so the same code serves exact rationals and
//! floats. For exact scalars the optimal dual solution also yields the
//! lexicographically smallest optimal permutation: every optimal assignment
//! is a perfect matching of the tight subgraph, and vice versa.

use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

pub trait Weight: Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {}

impl<T> Weight for T where T: Clone + PartialOrd + Zero + Add<Output = T> + Sub<Output = T> + Neg<Output = T> {}

#[derive(Debug, Clone)]
pub struct Assignment<T> {
    /// `cols[i]` is the column assigned to row `i`.
    pub cols: Vec<usize>,
    pub value: T,
    /// Duals of the minimisation on `-w`: `-w(i,j) - u[i] - v[j] >= 0`,
    /// with equality on every optimal assignment.
    pub u: Vec<T>,
    pub v: Vec<T>,
}

/// Maximises `Σ w(i, σ(i))` over permutations of `0..n`.
pub fn max_assignment<T: Weight>(n: usize, w: impl Fn(usize, usize) -> T) -> Assignment<T> {
    // 1-indexed arrays; index 0 is the virtual source column.
    let cost = |i: usize, j: usize| -w(i - 1, j - 1);
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<T>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().unwrap();
                if delta.as_ref().is_none_or(|d| *mj < *d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("at least one free column");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].take() {
                    minv[j] = Some(m - delta.clone());
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut cols = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            cols[p[j] - 1] = j - 1;
        }
    }
    let value = cols.iter().enumerate().fold(T::zero(), |acc, (i, &j)| acc + w(i, j));
    Assignment { cols, value, u: u[1..].to_vec(), v: v[1..].to_vec() }
}

/// Lexicographically smallest optimal assignment, for exact scalars.
pub fn lex_min_optimal<T: Weight>(n: usize, w: impl Fn(usize, usize) -> T) -> Assignment<T> {
    let base = max_assignment(n, &w);
    let tight: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| (-w(i, j) - base.u[i].clone() - base.v[j].clone()).is_zero()).collect())
        .collect();
    let mut cols = Vec::with_capacity(n);
    let mut col_used = vec![false; n];
    for i in 0..n {
        let mut choice = None;
        for j in 0..n {
            if !tight[i][j] || col_used[j] {
                continue;
            }
            col_used[j] = true;
            let ok = has_perfect_matching(&tight, i + 1, &col_used);
            col_used[j] = false;
            if ok {
                choice = Some(j);
                break;
            }
        }
        let choice = choice.expect("tight graph of an optimal dual has a perfect matching");
        col_used[choice] = true;
        cols.push(choice);
    }
    let value = cols.iter().enumerate().fold(T::zero(), |acc, (i, &j)| acc + w(i, j));
    Assignment { cols, value, ..base }
}

/// Kuhn's augmenting paths on rows `from..n` against the unused columns.
fn has_perfect_matching(adj: &[Vec<bool>], from: usize, col_used: &[bool]) -> bool {
    let n = adj.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        r: usize,
        adj: &[Vec<bool>],
        col_used: &[bool],
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for c in 0..adj.len() {
            if adj[r][c] && !col_used[c] && !seen[c] {
                seen[c] = true;
                if match_col[c].is_none_or(|r2| augment(r2, adj, col_used, seen, match_col)) {
                    match_col[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    (from..n).all(|r| {
        let mut seen = vec![false; n];
        augment(r, adj, col_used, &mut seen, &mut match_col)
    })
}
