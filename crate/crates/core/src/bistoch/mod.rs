//! Bistochastic matrices and the Marcus–Ree functional.

mod assignment;
mod equiv;

use serde::Serialize;

pub use assignment::{lex_min_optimal, max_assignment, Assignment, Weight};
pub use equiv::{canonical_form, canonical_grid, equivalence_witness, equivalent, transpose_class_merge};

use crate::exactalg::{ExactMatrix, Perm, Rational};
use crate::{Error, Result};

/// Largest `n` for which [`MaxtraceMethod::Brute`] is accepted.
pub const BRUTE_MAX_N: usize = 10;

/// A square matrix with nonnegative entries whose rows and columns sum to one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BistochMatrix {
    inner: ExactMatrix,
}

impl BistochMatrix {
    pub fn new(inner: ExactMatrix) -> Result<Self> {
        if !inner.is_square() {
            return Err(Error::DimensionMismatch { expected: inner.rows(), found: inner.cols() });
        }
        if !is_bistochastic(&inner) {
            return Err(Error::NotBistochastic(format!("{inner:?}")));
        }
        Ok(BistochMatrix { inner })
    }

    pub(crate) fn new_unchecked(inner: ExactMatrix) -> Self {
        debug_assert!(is_bistochastic(&inner));
        BistochMatrix { inner }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(ExactMatrix::identity(n))
    }

    /// `J_n`, every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        Self::new_unchecked(ExactMatrix::uniform(n))
    }

    /// `M_n = (I_n + J_n) / 2`.
    pub fn midpoint(n: usize) -> Self {
        let half = Rational::new(1, 2);
        let m = ExactMatrix::identity(n).add(&ExactMatrix::uniform(n)).expect("same shape").scale(&half);
        Self::new_unchecked(m)
    }

    pub fn from_perm(p: &Perm) -> Self {
        Self::new_unchecked(crate::exactalg::perm_to_matrix(p))
    }

    pub fn n(&self) -> usize {
        self.inner.rows()
    }

    pub fn inner(&self) -> &ExactMatrix {
        &self.inner
    }

    pub fn into_inner(self) -> ExactMatrix {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.inner.get(i, j)
    }

    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.inner.transpose())
    }

    pub fn permute(&self, row: &Perm, col: &Perm) -> Self {
        Self::new_unchecked(self.inner.permute(row, col))
    }

    pub fn direct_sum(&self, other: &BistochMatrix) -> Self {
        Self::new_unchecked(self.inner.direct_sum(&other.inner))
    }
}

impl std::fmt::Debug for BistochMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.inner.fmt(f)
    }
}

impl TryFrom<ExactMatrix> for BistochMatrix {
    type Error = Error;

    fn try_from(m: ExactMatrix) -> Result<Self> {
        BistochMatrix::new(m)
    }
}

pub fn is_bistochastic(m: &ExactMatrix) -> bool {
    m.is_square()
        && m.entries().iter().all(|v| !v.is_negative())
        && m.row_sums().iter().chain(m.col_sums().iter()).all(|s| *s == Rational::one())
}

pub fn frobenius_sq(a: &BistochMatrix) -> Rational {
    a.inner.frobenius_dot(&a.inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxtraceMethod {
    /// Brute force for `n <= 8`, assignment otherwise.
    #[default]
    Auto,
    Brute,
    Assignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxtraceWitness {
    #[serde(serialize_with = "ser_display")]
    pub value: Rational,
    #[serde(serialize_with = "ser_display")]
    pub sigma: Perm,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Maximum of `Σ_i w(i, σ(i))` over `S_n` by enumeration in lexicographic
/// order. Ties keep the earliest permutation.
pub fn brute_max<T>(n: usize, w: impl Fn(usize, usize) -> T) -> (T, Perm)
where
    T: Clone + PartialOrd + std::ops::Add<Output = T> + num_traits::Zero,
{
    let trace = |p: &Perm| (0..n).fold(T::zero(), |acc, i| acc + w(i, p.apply(i)));
    let mut p = Perm::identity(n);
    let mut best = (trace(&p), p.clone());
    while p.next_lex() {
        let t = trace(&p);
        if t > best.0 {
            best = (t, p.clone());
        }
    }
    best
}

/// Exact maximal trace `max_σ Σ_i A(i, σ(i))` with its lexicographically
/// smallest witness.
pub fn maxtrace(a: &ExactMatrix, method: MaxtraceMethod) -> Result<MaxtraceWitness> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Err(Error::invalid("maxtrace of an empty matrix"));
    }
    let method = match method {
        MaxtraceMethod::Auto if n <= 8 => MaxtraceMethod::Brute,
        MaxtraceMethod::Auto => MaxtraceMethod::Assignment,
        m => m,
    };
    let w = |i: usize, j: usize| a.get(i, j).clone();
    match method {
        MaxtraceMethod::Brute => {
            if n > BRUTE_MAX_N {
                return Err(Error::Unsupported(format!("brute-force maxtrace for n = {n} > {BRUTE_MAX_N}")));
            }
            let (value, sigma) = brute_max(n, w);
            Ok(MaxtraceWitness { value, sigma })
        }
        _ => {
            let sol = lex_min_optimal(n, w);
            let sigma = Perm::from_images(sol.cols).expect("assignment is a permutation");
            Ok(MaxtraceWitness { value: sol.value, sigma })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErdosCertificate {
    #[serde(skip)]
    pub matrix: BistochMatrix,
    #[serde(serialize_with = "ser_display")]
    pub delta: Rational,
    pub witness: MaxtraceWitness,
    pub is_erdos: bool,
}

/// `Δ(A) = maxtrace(A) − ||A||_F²`, nonnegative on every bistochastic matrix.
pub fn delta(a: &BistochMatrix) -> ErdosCertificate {
    let witness = maxtrace(&a.inner, MaxtraceMethod::Auto).expect("bistochastic matrices are square and nonempty");
    let delta = &witness.value - &frobenius_sq(a);
    ErdosCertificate { matrix: a.clone(), is_erdos: delta.is_zero(), delta, witness }
}
