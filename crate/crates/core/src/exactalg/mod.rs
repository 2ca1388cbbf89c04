//! Exact arithmetic layer: rationals, permutations, matrices, elimination.
//!
//! Everything here is a pure function of immutable values, so it can be
//! shared freely between worker threads.

mod elim;
mod matrix;
mod perm;
mod rational;

pub use elim::{bareiss_rank, bareiss_solve, rank, solve_linear, Solution};
pub use matrix::{perm_to_matrix, ExactMatrix};
pub use perm::Perm;
pub use rational::Rational;
