//! A square-summable bistochastic array and finite truncations of it.
//!
//! Indices in this module start at 1, as for arrays indexed by ℕ.
//!
//! The example array is filled row by row: row `k` takes the value `2^-k`
//! from column `k` through `m_k`, where `m_k` is the first column at which
//! the row (including the entries forced by symmetry) sums to 1. Rows and
//! columns therefore sum to 1, yet `m_k` grows like `2^k`, so the array
//! cannot be stored densely; entries are computed from the `m_k`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bistoch::{maxtrace, BistochMatrix, MaxtraceMethod};
use crate::exactalg::{ExactMatrix, Rational};
use crate::{Error, Result};

/// The first `rows` rows (and, by symmetry, columns) of the example array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayPrefix {
    /// `m[k-1]` is the last nonzero column of row `k`.
    m: Vec<BigUint>,
}

pub fn example_array(rows: usize) -> Result<ArrayPrefix> {
    if rows == 0 {
        return Err(Error::invalid("array prefix needs at least one row"));
    }
    let mut m: Vec<BigUint> = Vec::with_capacity(rows);
    for k in 1..=rows {
        let kb = BigUint::from(k);
        let forced: Rational =
            (1..k).filter(|&j| m[j - 1] >= kb).map(|j| Rational::pow2_neg(j as u32)).sum();
        let remaining = Rational::one() - forced;
        let count = &remaining * &Rational::from_integer(num_bigint::BigInt::from(1) << k);
        assert!(count.denom() == &num_bigint::BigInt::from(1) && count.is_positive(), "row {k} cannot be completed");
        let count = count.numer().to_biguint().expect("positive");
        m.push(kb - 1u32 + count);
    }
    Ok(ArrayPrefix { m })
}

impl ArrayPrefix {
    pub fn rows(&self) -> usize {
        self.m.len()
    }

    /// Last nonzero column of row `k`.
    pub fn m(&self, k: usize) -> &BigUint {
        &self.m[k - 1]
    }

    /// `m_k` as `u64` when it fits.
    pub fn m_u64(&self, k: usize) -> Option<u64> {
        self.m(k).to_u64()
    }

    /// Whether `(i, j)` lies in a generated row or column.
    pub fn is_generated(&self, i: usize, j: usize) -> bool {
        i.min(j) <= self.rows()
    }

    /// Entry `A(i, j)`, or zero outside the generated cells.
    pub fn get(&self, i: usize, j: usize) -> Rational {
        assert!(i >= 1 && j >= 1, "array indices start at 1");
        let (lo, hi) = (i.min(j), i.max(j));
        if lo <= self.rows() && BigUint::from(hi) <= self.m[lo - 1] {
            Rational::pow2_neg(lo as u32)
        } else {
            Rational::zero()
        }
    }

    /// Exact sum of generated row `k`.
    pub fn row_sum(&self, k: usize) -> Rational {
        assert!((1..=self.rows()).contains(&k));
        let kb = BigUint::from(k);
        let before: Rational = (1..k).filter(|&j| self.m[j - 1] >= kb).map(|j| Rational::pow2_neg(j as u32)).sum();
        let own = Rational::from_integer(num_bigint::BigInt::from(&self.m[k - 1] - &kb + 1u32));
        before + own * Rational::pow2_neg(k as u32)
    }

    /// Number of cells holding `2^-k`: row `k` from the diagonal out, and
    /// the mirror image in column `k`.
    pub fn value_count(&self, k: usize) -> BigUint {
        let span = &self.m[k - 1] - BigUint::from(k);
        span * 2u32 + 1u32
    }

    /// Nonzero cells with both indices `<= max_col`, row-major.
    pub fn cells(&self, max_col: usize) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 1..=max_col {
            for j in 1..=max_col {
                if self.is_generated(i, j) {
                    let v = self.get(i, j);
                    if !v.is_zero() {
                        out.push((i, j, v));
                    }
                }
            }
        }
        out
    }

    /// The leading `k×k` block.
    pub fn leading_block(&self, k: usize) -> Result<ExactMatrix> {
        if k == 0 || k > self.rows() {
            return Err(Error::invalid(format!("block {k}x{k} not covered by {} generated rows", self.rows())));
        }
        let rows = (1..=k).map(|i| (1..=k).map(|j| self.get(i, j)).collect()).collect();
        ExactMatrix::from_rows(rows)
    }
}

/// `Σ A(i,j)²` over the generated cells.
pub fn prefix_l2(p: &ArrayPrefix) -> Rational {
    (1..=p.rows())
        .map(|k| {
            let count = Rational::from_integer(num_bigint::BigInt::from(p.value_count(k)));
            let v = Rational::pow2_neg(k as u32);
            count * &v * &v
        })
        .sum()
}

/// `Σ_{i<=T} A(2i, 2i−1) + A(2i−1, 2i)`, the trace of the pairing swap.
pub fn pairing_trace(p: &ArrayPrefix, terms: usize) -> Result<Rational> {
    if 2 * terms > p.rows() {
        return Err(Error::invalid(format!("{terms} swap terms need {} generated rows", 2 * terms)));
    }
    Ok((1..=terms).map(|i| p.get(2 * i, 2 * i - 1) + p.get(2 * i - 1, 2 * i)).sum())
}

/// `(4/3)(1 − 4^−T)`, the closed form of [`pairing_trace`].
pub fn pairing_trace_closed_form(terms: usize) -> Rational {
    Rational::new(4, 3) * (Rational::one() - Rational::pow2_neg(2 * terms as u32))
}

/// A nonnegative square matrix with row and column sums at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBistochastic(ExactMatrix);

impl SubBistochastic {
    pub fn new(m: ExactMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
        }
        let one = Rational::one();
        if m.entries().iter().any(Rational::is_negative)
            || m.row_sums().iter().chain(m.col_sums().iter()).any(|s| *s > one)
        {
            return Err(Error::invalid("not sub-bistochastic"));
        }
        Ok(SubBistochastic(m))
    }

    pub fn inner(&self) -> &ExactMatrix {
        &self.0
    }
}

/// Embeds `B` as the top-left block of the `2n×2n` bistochastic matrix
/// `[[B, diag(1−r)], [diag(1−c), X]]` with `X(i,j) = c_i r_j / ΣB` (and
/// `X = 0` when `B = 0`).
pub fn bistochastic_extension(b: &SubBistochastic) -> BistochMatrix {
    let b = &b.0;
    let n = b.rows();
    let (r, c) = (b.row_sums(), b.col_sums());
    let total: Rational = r.iter().sum();
    let one = Rational::one();
    let mut d = ExactMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            d.set(i, j, b.get(i, j).clone());
            if !total.is_zero() {
                d.set(n + i, n + j, &(&c[i] * &r[j]) / &total);
            }
        }
        d.set(i, n + i, &one - &r[i]);
        d.set(n + i, i, &one - &c[i]);
    }
    BistochMatrix::new(d).expect("extension is bistochastic")
}

/// `<A, B> = Σ A(i,j) B(j,i)` over a common square block.
pub fn array_pairing(a: &ExactMatrix, b: &ExactMatrix) -> Rational {
    let n = a.rows().min(b.rows());
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j) * b.get(j, i)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub k: usize,
    /// `<A, B_k>` with `B_k` the leading block of the second array.
    pub pairing_block: String,
    /// `<A, C_k>` with `C_k` the `2k×2k` extension of `B_k`.
    pub pairing_extension: String,
    /// `maxtrace(A_{2k})`.
    pub maxtrace: String,
    pub bound: String,
    pub holds: bool,
}

/// Checks `<A, B_k> <= <A, C_k> <= maxtrace(A_{2k}) <= 2` for two prefixes
/// of the example array.
pub fn truncated_mr_check(a: &ArrayPrefix, b: &ArrayPrefix, k: usize) -> Result<TruncationReport> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if 2 * k > a.rows() {
        return Err(Error::invalid(format!(
            "block not covered: the extension needs {} generated rows of the first array, found {}",
            2 * k,
            a.rows()
        )));
    }
    let bk = SubBistochastic::new(b.leading_block(k)?)?;
    let ck = bistochastic_extension(&bk);
    let a2k = a.leading_block(2 * k)?;
    let pb = array_pairing(&a2k, bk.inner());
    let pc = array_pairing(&a2k, ck.inner());
    let mt = maxtrace(&a2k, MaxtraceMethod::Auto)?.value;
    let bound = Rational::from(2);
    let holds = pb <= pc && pc <= mt && mt <= bound;
    Ok(TruncationReport {
        k,
        pairing_block: pb.to_string(),
        pairing_extension: pc.to_string(),
        maxtrace: mt.to_string(),
        bound: bound.to_string(),
        holds,
    })
}
