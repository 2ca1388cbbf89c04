//! Exact computations on the Birkhoff polytope of bistochastic matrices.
//!
//! The crate is organised around the Marcus–Ree functional
//! `delta(A) = maxtrace(A) - ||A||_F^2`, which is nonnegative on every
//! bistochastic matrix. Matrices with `delta = 0` are called Erdős matrices.
//!
//! - [`exactalg`]: rationals, permutations, exact matrices, fraction-free elimination.
//! - [`bistoch`]: bistochasticity, maxtrace, `delta`, equivalence `A ~ PAQ`, canonical forms.
//! - [`erdosenum`]: Gram-system enumeration of all Erdős matrices for `n = 3, 4`.
//! - [`orbits`]: orbit counts of `k`-subsets of `S_n` under `S -> mu S nu`.
//! - [`alphafam`]: one-parameter families of matrices with prescribed `delta`.
//! - [`infarray`]: a square-summable bistochastic array and the extension lemma.
//! - [`kernelmr`]: dyadic discretisation of bistochastic kernels.
//! - [`randindep`]: Monte Carlo linear dependence of random permutation matrices.
//! - [`format`]: text formats shared with the command line tool.

#![allow(clippy::needless_range_loop)]

pub mod alphafam;
pub mod bistoch;
pub mod erdosenum;
mod error;
pub mod exactalg;
pub mod format;
pub mod infarray;
pub mod kernelmr;
pub mod orbits;
pub mod randindep;

pub use error::{Error, Result};
pub use exactalg::{ExactMatrix, Perm, Rational};
