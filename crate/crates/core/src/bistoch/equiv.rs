//! The relation `A ~ PAQ` and canonical representatives.
//!
//! The canonical form is the row-major lexicographic minimum of the orbit.
//! Once rows are chosen, sorting columns lexicographically minimises the
//! matrix, and the first `d` rows of that minimum depend only on the first
//! `d` chosen rows. The search therefore builds the answer row by row and
//! only branches on rows that tie for the smallest next row. Worst case is
//! still `n!` (e.g. highly symmetric inputs), so this is meant for small `n`.

use std::collections::HashSet;

use super::BistochMatrix;
use crate::exactalg::{ExactMatrix, Perm};
use crate::{Error, Result};

/// Lexicographically smallest `P A Q` of a square grid.
pub fn canonical_grid<T: Ord + Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let mut search = Search { a, best: None, prefix: Vec::with_capacity(n) };
    let groups = if n == 0 { Vec::new() } else { vec![(0..n).collect()] };
    search.descend(&mut vec![false; n], &groups);
    search.best.unwrap_or_default()
}

struct Search<'a, T> {
    a: &'a [Vec<T>],
    best: Option<Vec<Vec<T>>>,
    prefix: Vec<Vec<T>>,
}

impl<T: Ord + Clone> Search<'_, T> {
    fn descend(&mut self, used: &mut [bool], groups: &[Vec<usize>]) {
        let n = self.a.len();
        let d = self.prefix.len();
        if d == n {
            if self.best.as_ref().is_none_or(|b| self.prefix < *b) {
                self.best = Some(self.prefix.clone());
            }
            return;
        }
        let mut candidates: Vec<(usize, Vec<T>)> = Vec::new();
        let mut seen_rows: Vec<&[T]> = Vec::new();
        for r in 0..n {
            // Identical rows of A lead to identical subtrees.
            if used[r] || seen_rows.contains(&&self.a[r][..]) {
                continue;
            }
            seen_rows.push(&self.a[r][..]);
            let row = self.refined_row(r, groups);
            match candidates.first().map(|c| row.cmp(&c.1)) {
                Some(std::cmp::Ordering::Greater) => continue,
                Some(std::cmp::Ordering::Less) => candidates.clear(),
                _ => {}
            }
            candidates.push((r, row));
        }
        let min_row = candidates[0].1.clone();
        if let Some(best) = &self.best {
            let ord = self.prefix.iter().chain(std::iter::once(&min_row)).cmp(best[..=d].iter());
            if ord == std::cmp::Ordering::Greater {
                return;
            }
        }
        for (r, row) in candidates {
            let next = self.split(r, groups);
            used[r] = true;
            self.prefix.push(row);
            self.descend(used, &next);
            self.prefix.pop();
            used[r] = false;
        }
    }

    /// Row `r` with each column group sorted ascending.
    fn refined_row(&self, r: usize, groups: &[Vec<usize>]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.a.len());
        for g in groups {
            let start = out.len();
            out.extend(g.iter().map(|&c| self.a[r][c].clone()));
            out[start..].sort();
        }
        out
    }

    fn split(&self, r: usize, groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let row = &self.a[r];
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let mut g = g.clone();
            g.sort_by(|&x, &y| row[x].cmp(&row[y]));
            let mut start = 0;
            for i in 1..=g.len() {
                if i == g.len() || row[g[i]] != row[g[start]] {
                    out.push(g[start..i].to_vec());
                    start = i;
                }
            }
        }
        out
    }
}

fn grid(m: &ExactMatrix) -> Vec<Vec<crate::Rational>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn canonical_form(a: &BistochMatrix) -> BistochMatrix {
    let g = canonical_grid(&grid(a.inner()));
    BistochMatrix::new_unchecked(ExactMatrix::from_rows(g).expect("square grid"))
}

/// Permutations `(row, col)` with `a.permute(row, col) == b`, if any.
pub fn equivalence_witness(a: &BistochMatrix, b: &BistochMatrix) -> Result<Option<(Perm, Perm)>> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.n() });
    }
    let sorted = |m: &ExactMatrix| -> Vec<Vec<crate::Rational>> {
        (0..n)
            .map(|i| {
                let mut r = m.row(i).to_vec();
                r.sort();
                r
            })
            .collect()
    };
    let (sa, sb) = (sorted(a.inner()), sorted(b.inner()));
    let mut row = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(witness_search(a.inner(), b.inner(), &sa, &sb, &mut row, &mut used))
}

fn witness_search(
    a: &ExactMatrix,
    b: &ExactMatrix,
    sa: &[Vec<crate::Rational>],
    sb: &[Vec<crate::Rational>],
    row: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<(Perm, Perm)> {
    let n = a.rows();
    let i = row.len();
    if i == n {
        return match_columns(a, b, row);
    }
    for r in 0..n {
        if used[r] || sa[r] != sb[i] {
            continue;
        }
        used[r] = true;
        row.push(r);
        let found = witness_search(a, b, sa, sb, row, used);
        row.pop();
        used[r] = false;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Given rows, pairs each column of `b` with an unused equal column of `a`.
/// Equal columns are interchangeable, so a greedy choice is complete.
fn match_columns(a: &ExactMatrix, b: &ExactMatrix, row: &[usize]) -> Option<(Perm, Perm)> {
    let n = a.rows();
    let mut taken = vec![false; n];
    let mut col_inv = Vec::with_capacity(n);
    for j in 0..n {
        let c = (0..n).find(|&c| !taken[c] && (0..n).all(|k| a.get(row[k], c) == b.get(k, j)))?;
        taken[c] = true;
        col_inv.push(c);
    }
    let row = Perm::from_images(row.to_vec()).expect("distinct rows");
    let col = Perm::from_images(col_inv).expect("distinct columns").inverse();
    Some((row, col))
}

pub fn equivalent(a: &BistochMatrix, b: &BistochMatrix) -> Result<bool> {
    Ok(equivalence_witness(a, b)?.is_some())
}

/// Keeps the first representative of each class of `A ≈ B`, meaning
/// `A ~ B` or `A ~ Bᵀ`.
pub fn transpose_class_merge(list: &[BistochMatrix]) -> Vec<BistochMatrix> {
    let mut seen = HashSet::new();
    list.iter()
        .filter(|a| {
            let key = canonical_form(a).min(canonical_form(&a.transpose()));
            seen.insert(key)
        })
        .cloned()
        .collect()
}
