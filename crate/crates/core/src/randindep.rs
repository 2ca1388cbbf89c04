//! Monte Carlo estimate of how often a random set of `(n−1)²+1` distinct
//! permutation matrices is linearly dependent.
//!
//! Every sample owns a ChaCha stream keyed by `(seed, sample index)`, so the
//! result does not depend on how samples are spread over threads.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exactalg::bareiss_rank;
use crate::{Error, Perm, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n: usize,
    pub k: usize,
    pub iters: u64,
    pub seed: u64,
}

impl McConfig {
    /// Subset size defaults to `(n−1)²+1`, the largest that can be independent.
    pub fn new(n: usize, iters: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        McConfig { n, k: (n - 1) * (n - 1) + 1, iters, seed }.validated()
    }

    pub fn with_k(self, k: usize) -> Result<Self> {
        McConfig { k, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.iters == 0 {
            return Err(Error::invalid("iters must be at least 1"));
        }
        if self.k == 0 || !factorial_at_least(self.n, self.k) {
            return Err(Error::invalid(format!("k = {} exceeds {}!", self.k, self.n)));
        }
        Ok(self)
    }
}

fn factorial_at_least(n: usize, k: usize) -> bool {
    let mut f = 1usize;
    for i in 2..=n {
        f = f.saturating_mul(i);
        if f >= k {
            return true;
        }
    }
    f >= k
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub n: usize,
    pub k: usize,
    pub iters: u64,
    pub dependent: u64,
    pub independent: u64,
    /// Draws thrown away because they repeated a permutation.
    pub rejected: u64,
    pub estimate: f64,
    pub wilson95: (f64, f64),
}

impl McResult {
    pub fn tsv_header() -> &'static str {
        "n\titers\td\testimate\tci_low\tci_high"
    }

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.n, self.iters, self.dependent, self.estimate, self.wilson95.0, self.wilson95.1
        )
    }
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson95(successes: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + Z * Z / n;
    let center = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn uniform_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Perm {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Perm::from_images(images).expect("shuffle of 0..n")
}

/// Draws `k` i.i.d. uniform permutations, redrawing all of them until they
/// are distinct. Returns the subset and the number of rejected draws.
pub fn sample_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> (Vec<Perm>, u64) {
    let mut rejected = 0;
    loop {
        let mut perms: Vec<Perm> = (0..k).map(|_| uniform_perm(n, rng)).collect();
        let mut sorted = perms.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == k {
            return (std::mem::take(&mut perms), rejected);
        }
        rejected += 1;
    }
}

/// Coordinates of `P` in the span of all permutation matrices.
///
/// A matrix with every row and column sum equal to `s` is determined by its
/// leading `(n−1)×(n−1)` block and `s`, so this map is injective on the span
/// and preserves rank.
fn coords(p: &Perm) -> Vec<u8> {
    let n = p.len();
    let m = n.saturating_sub(1);
    let mut v = vec![0u8; m * m + 1];
    for i in 0..m {
        let j = p.apply(i);
        if j < m {
            v[i * m + j] = 1;
        }
    }
    v[m * m] = 1;
    v
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly chosen prime in `[2^61, 2^62)`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

fn rank_mod(rows: &[Vec<u8>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let (nrows, ncols) = (m.len(), m.first().map_or(0, Vec::len));
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for x in &mut m[rank][col..] {
            *x = mul_mod(*x, inv, p);
        }
        let (head, tail) = m.split_at_mut(rank + 1);
        let prow = &head[rank];
        for row in tail {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for j in col..ncols {
                if prow[j] != 0 {
                    row[j] = (row[j] + p - mul_mod(f, prow[j], p)) % p;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Rank below `perms.len()` over the rationals, by exact elimination.
pub fn is_dependent_exact(perms: &[Perm]) -> bool {
    let rows: Vec<Vec<BigInt>> = perms.iter().map(|p| coords(p).into_iter().map(BigInt::from).collect()).collect();
    bareiss_rank(rows) < perms.len()
}

/// Rank below `perms.len()` modulo the prime `p`. Never misses a
/// dependence, but may report one that only exists mod `p`.
pub fn is_dependent_mod_p(perms: &[Perm], p: u64) -> bool {
    let rows: Vec<Vec<u8>> = perms.iter().map(coords).collect();
    rank_mod(&rows, p) < perms.len()
}

/// Full rank modulo `p` proves independence; a deficient rank is confirmed
/// exactly, since it may be an artefact of the prime.
pub fn is_dependent_with_prime(perms: &[Perm], p: u64) -> bool {
    is_dependent_mod_p(perms, p) && is_dependent_exact(perms)
}

pub fn is_dependent(perms: &[Perm]) -> bool {
    is_dependent_with_prime(perms, random_prime(&mut rand::thread_rng()))
}

/// The random stream for sample `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn estimate(config: &McConfig) -> McResult {
    let McConfig { n, k, iters, seed } = *config;
    let (dependent, rejected) = (0..iters)
        .into_par_iter()
        .map(|idx| {
            let mut rng = sample_rng(seed, idx);
            let (perms, rej) = sample_subset(n, k, &mut rng);
            let p = random_prime(&mut rng);
            (is_dependent_with_prime(&perms, p) as u64, rej)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    McResult {
        n,
        k,
        iters,
        dependent,
        independent: iters - dependent,
        rejected,
        estimate: dependent as f64 / iters as f64,
        wilson95: wilson95(dependent, iters),
    }
}
