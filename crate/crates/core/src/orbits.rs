//! Orbits of `k`-subsets of `S_n` under `S ↦ μSν`.
//!
//! Two independent counters: canonical keys (explicit orbit
//! representatives) and Burnside's lemma over the pairs `(μ, ν)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exactalg::Perm;
use crate::{Error, Result};

/// Largest `n` for the canonical-key counter.
pub const CANONICAL_MAX_N: usize = 4;
/// Largest `n` for Burnside with an explicit cycle decomposition per pair.
pub const DIRECT_MAX_N: usize = 5;
/// Largest `n` for Burnside collapsed onto pairs of conjugacy classes.
pub const CLASS_MAX_N: usize = 12;

/// A subset of `S_n` as strictly increasing indices into `Perm::all(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetKey(Vec<usize>);

impl SubsetKey {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        let order = factorial(n);
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("repeated permutation in subset"));
        }
        if indices.last().is_some_and(|&i| i >= order) {
            return Err(Error::invalid(format!("permutation index out of range for S_{n}")));
        }
        Ok(SubsetKey(indices))
    }

    pub fn from_perms(perms: &[Perm]) -> Result<Self> {
        let n = perms.first().map_or(0, Perm::len);
        if perms.iter().any(|p| p.len() != n) {
            return Err(Error::invalid("permutations of different sizes"));
        }
        SubsetKey::new(perms.iter().map(Perm::lex_rank).collect(), n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `S_n` with a product table: `mul[a][b]` is the index of `a.then(b)`.
struct Group {
    perms: Vec<Perm>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl Group {
    fn new(n: usize) -> Self {
        let perms = Perm::all(n);
        let mul = perms.iter().map(|a| perms.iter().map(|b| a.then(b).lex_rank()).collect()).collect();
        let inv = perms.iter().map(|a| a.inverse().lex_rank()).collect();
        Group { perms, mul, inv }
    }

    fn order(&self) -> usize {
        self.perms.len()
    }

    /// `τ ↦ ν⁻¹ σ⁻¹ τ ν`, which sends `σ` to the identity.
    fn normalise(&self, sigma: usize, nu: usize, tau: usize) -> usize {
        let m = &self.mul;
        m[m[m[self.inv[nu]][self.inv[sigma]]][tau]][nu]
    }
}

/// Orbit representative: the lexicographically smallest sorted key among
/// the orbit members that contain the identity.
pub fn canonical_subset(s: &SubsetKey, n: usize) -> Result<SubsetKey> {
    if s.is_empty() {
        return Err(Error::invalid("empty subset"));
    }
    if n > DIRECT_MAX_N {
        return Err(Error::Unsupported(format!("canonical subsets for n = {n} > {DIRECT_MAX_N}")));
    }
    let g = Group::new(n);
    if s.0.iter().any(|&i| i >= g.order()) {
        return Err(Error::invalid(format!("permutation index out of range for S_{n}")));
    }
    let mut best: Option<Vec<usize>> = None;
    let mut buf = Vec::with_capacity(s.len());
    for &sigma in &s.0 {
        for nu in 0..g.order() {
            buf.clear();
            buf.extend(s.0.iter().map(|&tau| g.normalise(sigma, nu, tau)));
            buf.sort_unstable();
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
    }
    Ok(SubsetKey(best.expect("nonempty subset")))
}

/// Transform tables for the bitmask counter. Element `i` is bit `N-1-i`,
/// so the lexicographically smallest sorted key is the largest mask.
struct MaskTables {
    order: usize,
    /// `bits[(σ·N + ν)·N + τ]` is the bit of `ν⁻¹σ⁻¹τν`.
    bits: Vec<u32>,
}

impl MaskTables {
    fn new(n: usize) -> Self {
        let g = Group::new(n);
        let order = g.order();
        let mut bits = Vec::with_capacity(order * order * order);
        for sigma in 0..order {
            for nu in 0..order {
                for tau in 0..order {
                    bits.push(1u32 << (order - 1 - g.normalise(sigma, nu, tau)));
                }
            }
        }
        MaskTables { order, bits }
    }

    /// Whether `mask` (which contains the identity) is the largest mask in its orbit.
    fn is_canonical(&self, mask: u32, members: &[usize]) -> bool {
        let n = self.order;
        for &sigma in members {
            for nu in 0..n {
                let table = &self.bits[(sigma * n + nu) * n..][..n];
                let image = members.iter().fold(0u32, |acc, &tau| acc | table[tau]);
                if image > mask {
                    return false;
                }
            }
        }
        true
    }
}

/// `f_{n,k}` by counting canonical representatives.
pub fn count_orbits_canonical(n: usize, k: usize) -> Result<u64> {
    if n > CANONICAL_MAX_N {
        return Err(Error::Unsupported(format!(
            "canonical orbit counting for n = {n}; use the Burnside method (canonical supports n <= {CANONICAL_MAX_N})"
        )));
    }
    let order = factorial(n);
    if k == 0 || k > order {
        return Ok(u64::from(k == 0));
    }
    let t = MaskTables::new(n);
    let top = 1u32 << (order - 1);
    let count_from = |members: &mut Vec<usize>, lo: usize| {
        let mut count = 0u64;
        combinations(lo, order, k - members.len(), members, &mut |m| {
            let mask = m.iter().fold(0u32, |acc, &i| acc | (1 << (order - 1 - i)));
            debug_assert!(mask & top != 0);
            if t.is_canonical(mask, m) {
                count += 1;
            }
        });
        count
    };
    if k == 1 {
        return Ok(count_from(&mut vec![0], 1));
    }
    Ok((1..order).into_par_iter().map(|second| count_from(&mut vec![0, second], second + 1)).sum())
}

fn combinations(lo: usize, hi: usize, r: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if r == 0 {
        f(prefix);
        return;
    }
    for a in lo..=hi.saturating_sub(r) {
        prefix.push(a);
        combinations(a + 1, hi, r - 1, prefix, f);
        prefix.pop();
    }
}

/// Cycle lengths of `σ ↦ μσν` on `S_n`, nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairCycleProfile {
    lengths: Vec<usize>,
}

impl PairCycleProfile {
    pub fn of(mu: &Perm, nu: &Perm) -> Self {
        let g = Group::new(mu.len());
        Self::from_group(&g, mu.lex_rank(), nu.lex_rank())
    }

    fn from_group(g: &Group, mu: usize, nu: usize) -> Self {
        let order = g.order();
        let mut seen = vec![false; order];
        let mut lengths = Vec::new();
        for start in 0..order {
            let mut len = 0;
            let mut s = start;
            while !seen[s] {
                seen[s] = true;
                s = g.mul[g.mul[mu][s]][nu];
                len += 1;
            }
            if len > 0 {
                lengths.push(len);
            }
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        PairCycleProfile { lengths }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Coefficients `0..=kmax` of `Π (1 + z^len)`: entry `k` counts the
    /// `k`-subsets that are unions of cycles.
    pub fn union_counts(&self, kmax: usize) -> Vec<BigUint> {
        let mut mult: HashMap<usize, usize> = HashMap::new();
        for &l in &self.lengths {
            *mult.entry(l).or_default() += 1;
        }
        union_poly(mult.into_iter().collect::<Vec<_>>().as_slice(), kmax)
    }
}

/// `Π_d (1 + z^d)^{c_d}` truncated at degree `kmax`.
fn union_poly(cycles: &[(usize, usize)], kmax: usize) -> Vec<BigUint> {
    let mut poly = vec![BigUint::zero(); kmax + 1];
    poly[0] = BigUint::one();
    for &(d, c) in cycles {
        if c == 0 || d > kmax {
            continue;
        }
        let terms = c.min(kmax / d);
        let binom = binomials(c, terms);
        let mut next = vec![BigUint::zero(); kmax + 1];
        for (i, a) in poly.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in binom.iter().enumerate() {
                let deg = i + j * d;
                if deg > kmax {
                    break;
                }
                next[deg] += a * b;
            }
        }
        poly = next;
    }
    poly
}

/// `C(c, 0..=terms)`.
fn binomials(c: usize, terms: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(terms + 1);
    let mut b = BigUint::one();
    out.push(b.clone());
    for j in 1..=terms {
        b = b * BigUint::from(c + 1 - j) / BigUint::from(j);
        out.push(b.clone());
    }
    out
}

/// `f_{n,k}` for `k = 0..=kmax` by Burnside over all pairs `(μ, ν)`.
pub fn burnside_direct(n: usize, kmax: usize) -> Result<Vec<BigUint>> {
    if n > DIRECT_MAX_N {
        return Err(Error::Unsupported(format!("direct Burnside for n = {n} > {DIRECT_MAX_N}")));
    }
    let g = Group::new(n);
    let order = g.order();
    let tally = (0..order)
        .into_par_iter()
        .map(|mu| {
            let mut t: HashMap<PairCycleProfile, u64> = HashMap::new();
            for nu in 0..order {
                *t.entry(PairCycleProfile::from_group(&g, mu, nu)).or_default() += 1;
            }
            t
        })
        .reduce(HashMap::new, |mut a, b| {
            for (p, c) in b {
                *a.entry(p).or_default() += c;
            }
            a
        });
    let mut total = vec![BigUint::zero(); kmax + 1];
    for (profile, weight) in tally {
        for (acc, v) in total.iter_mut().zip(profile.union_counts(kmax)) {
            *acc += v * weight;
        }
    }
    Ok(divide_exact(total, BigUint::from(order) * BigUint::from(order)))
}

fn divide_exact(v: Vec<BigUint>, d: BigUint) -> Vec<BigUint> {
    v.into_iter()
        .map(|x| {
            let (q, r) = x.div_rem(&d);
            assert!(r.is_zero(), "Burnside sum not divisible by group order");
            q
        })
        .collect()
}

/// Integer partitions of `n`, each nonincreasing.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `z_λ = Π_i i^{m_i} m_i!`, the centraliser order of a permutation of type `λ`.
fn centraliser(lambda: &[usize]) -> u128 {
    let mut mult: HashMap<usize, u32> = HashMap::new();
    for &p in lambda {
        *mult.entry(p).or_default() += 1;
    }
    mult.iter().map(|(&i, &m)| (i as u128).pow(m) * (1..=m as u128).product::<u128>()).product()
}

/// Cycle type of the `j`-th power of a permutation of type `λ`.
fn power_type(lambda: &[usize], j: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for &l in lambda {
        let g = l.gcd(&j);
        out.extend(std::iter::repeat_n(l / g, g));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

fn mobius(mut n: usize) -> i128 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn lcm_of(lambda: &[usize]) -> usize {
    lambda.iter().fold(1, |acc, &l| acc.lcm(&l))
}

/// Number of cycles of each length of `σ ↦ μσν` for `μ` of type `a` and
/// `ν` of type `b`. `φ^j` fixes `σ` iff `σ ν^j σ⁻¹ = μ^{-j}`, which has
/// `z_{type(ν^j)}` solutions when `μ^j` and `ν^j` have the same type.
fn class_pair_cycles(a: &[usize], b: &[usize]) -> Vec<(usize, usize)> {
    let period = lcm_of(a).lcm(&lcm_of(b));
    let divisors: Vec<usize> = (1..=period).filter(|d| period.is_multiple_of(*d)).collect();
    let fix = |j: usize| -> i128 {
        let tb = power_type(b, j);
        if power_type(a, j) == tb {
            centraliser(&tb) as i128
        } else {
            0
        }
    };
    let fixes: HashMap<usize, i128> = divisors.iter().map(|&d| (d, fix(d))).collect();
    divisors
        .iter()
        .filter_map(|&d| {
            let s: i128 = divisors.iter().filter(|&&e| d % e == 0).map(|&e| mobius(d / e) * fixes[&e]).sum();
            assert!(s % d as i128 == 0 && s >= 0);
            let c = (s / d as i128) as usize;
            (c > 0).then_some((d, c))
        })
        .collect()
}

/// `f_{n,k}` for `k = 0..=kmax` by Burnside collapsed onto conjugacy classes.
pub fn burnside_by_class(n: usize, kmax: usize) -> Result<Vec<BigUint>> {
    if n > CLASS_MAX_N {
        return Err(Error::Unsupported(format!("class-collapsed Burnside for n = {n} > {CLASS_MAX_N}")));
    }
    let order: u128 = (1..=n as u128).product();
    let classes: Vec<(Vec<usize>, u128)> =
        partitions(n).into_iter().map(|l| {
            let size = order / centraliser(&l);
            (l, size)
        }).collect();
    let pairs: Vec<(usize, usize)> =
        (0..classes.len()).flat_map(|i| (0..classes.len()).map(move |j| (i, j))).collect();
    let total = pairs
        .par_iter()
        .map(|&(i, j)| {
            let weight = BigUint::from(classes[i].1) * BigUint::from(classes[j].1);
            union_poly(&class_pair_cycles(&classes[i].0, &classes[j].0), kmax)
                .into_iter()
                .map(|c| c * &weight)
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![BigUint::zero(); kmax + 1],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
        );
    Ok(divide_exact(total, BigUint::from(order) * BigUint::from(order)))
}

/// `f_{n,k}` by Burnside's lemma.
pub fn count_orbits_burnside(n: usize, k: usize) -> Result<BigUint> {
    let order = (1..=n).try_fold(1usize, |acc, i| acc.checked_mul(i));
    if order.is_some_and(|o| k > o) {
        return Ok(BigUint::zero());
    }
    let table = if n <= DIRECT_MAX_N { burnside_direct(n, k)? } else { burnside_by_class(n, k)? };
    Ok(table[k].clone())
}

/// `f_{n,1..=kmax}`, by the fastest available method.
pub fn orbit_table(n: usize, kmax: usize) -> Result<Vec<BigUint>> {
    let t = if n <= DIRECT_MAX_N { burnside_direct(n, kmax)? } else { burnside_by_class(n, kmax)? };
    Ok(t.into_iter().skip(1).collect())
}

/// `p(n)` by Euler's pentagonal-number recurrence.
pub fn partition_count(n: usize) -> BigUint {
    let mut p = vec![BigUint::zero(); n + 1];
    p[0] = BigUint::one();
    for m in 1..=n {
        let (mut plus, mut minus) = (BigUint::zero(), BigUint::zero());
        for j in 1.. {
            let g1 = j * (3 * j - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = j * (3 * j + 1) / 2;
            let bucket = if j % 2 == 1 { &mut plus } else { &mut minus };
            *bucket += &p[m - g1];
            if g2 <= m {
                *bucket += &p[m - g2];
            }
        }
        p[m] = plus - minus;
    }
    p.swap_remove(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistoch::testutil::perm;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn partition_numbers() {
        let expect = [1u64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &p) in expect.iter().enumerate() {
            assert_eq!(partition_count(n), big(p));
            assert_eq!(partitions(n).len() as u64, p);
        }
        assert_eq!(partition_count(100), "190569292".parse::<BigUint>().unwrap());
    }

    #[test]
    fn singleton_canonical_is_identity() {
        for n in 1..=4 {
            for i in 0..factorial(n) {
                let key = SubsetKey::new(vec![i], n).unwrap();
                assert_eq!(canonical_subset(&key, n).unwrap().indices(), &[0]);
            }
        }
    }

    #[test]
    fn conjugate_pairs_share_a_key() {
        let id = Perm::identity(4);
        let a = Perm::from_one_line(&[2, 1, 3, 4]).unwrap();
        let b = Perm::from_one_line(&[1, 2, 4, 3]).unwrap();
        let c = Perm::from_one_line(&[2, 3, 1, 4]).unwrap();
        let key = |p: &Perm| canonical_subset(&SubsetKey::from_perms(&[id.clone(), p.clone()]).unwrap(), 4).unwrap();
        assert_eq!(key(&a), key(&b));
        assert_ne!(key(&a), key(&c));
    }

    #[test]
    fn subset_key_validation() {
        assert!(SubsetKey::new(vec![1, 1], 3).is_err());
        assert!(SubsetKey::new(vec![6], 3).is_err());
        assert_eq!(SubsetKey::new(vec![3, 1], 3).unwrap().indices(), &[1, 3]);
        assert!(canonical_subset(&SubsetKey::new(vec![], 3).unwrap(), 3).is_err());
    }

    #[test]
    fn n3_table_both_methods() {
        let expect = [1u64, 2, 2, 2, 1, 1];
        let burnside = burnside_direct(3, 6).unwrap();
        let by_class = burnside_by_class(3, 6).unwrap();
        for k in 1..=6 {
            assert_eq!(count_orbits_canonical(3, k).unwrap(), expect[k - 1]);
            assert_eq!(burnside[k], big(expect[k - 1]));
            assert_eq!(by_class[k], big(expect[k - 1]));
        }
    }

    #[test]
    fn n4_small_k_agree() {
        let expect = [1u64, 4, 10, 41, 103];
        let table = burnside_direct(4, 24).unwrap();
        for k in 1..=5 {
            assert_eq!(count_orbits_canonical(4, k).unwrap(), expect[k - 1]);
            assert_eq!(table[k], big(expect[k - 1]));
        }
        for k in 0..=24 {
            assert_eq!(table[k], table[24 - k]);
        }
        assert_eq!(burnside_by_class(4, 24).unwrap(), table);
    }

    #[test]
    fn n5_spot_values() {
        assert_eq!(count_orbits_burnside(5, 4).unwrap(), big(715));
        assert_eq!(count_orbits_burnside(5, 12).unwrap(), big(732149722382));
        assert_eq!(burnside_by_class(5, 12).unwrap(), burnside_direct(5, 12).unwrap());
    }

    #[test]
    fn pairs_count_nontrivial_classes() {
        for n in 2..=8 {
            assert_eq!(count_orbits_burnside(n, 2).unwrap(), partition_count(n) - 1u32, "n = {n}");
        }
    }

    #[test]
    fn rejects_large_n() {
        assert!(count_orbits_canonical(5, 2).is_err());
        assert!(burnside_direct(6, 2).is_err());
        assert_eq!(count_orbits_canonical(3, 7).unwrap(), 0);
    }

    #[test]
    fn mobius_values() {
        let m: Vec<i128> = (1..=10).map(mobius).collect();
        assert_eq!(m, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    }

    proptest! {
        #[test]
        fn generating_function_identity((mu, nu) in (perm(3), perm(3))) {
            // Brute force: subsets of S_3 mapped to themselves by σ ↦ μσν.
            let g = Group::new(3);
            let (m, v) = (mu.lex_rank(), nu.lex_rank());
            let mut counts = vec![0u64; 7];
            for mask in 0u32..64 {
                let image = (0..6).filter(|&s| mask & (1 << s) != 0)
                    .fold(0u32, |acc, s| acc | 1 << g.mul[g.mul[m][s]][v]);
                if image == mask {
                    counts[mask.count_ones() as usize] += 1;
                }
            }
            let profile = PairCycleProfile::of(&mu, &nu);
            prop_assert_eq!(profile.lengths().iter().sum::<usize>(), 6);
            let poly = profile.union_counts(6);
            prop_assert_eq!(poly, counts.into_iter().map(BigUint::from).collect::<Vec<_>>());
        }

        #[test]
        fn canonical_key_is_orbit_invariant(
            rest in proptest::collection::btree_set(0usize..24, 1..8),
            mu in perm(4),
            nu in perm(4),
        ) {
            let perms = Perm::all(4);
            let s: Vec<Perm> = rest.iter().map(|&i| perms[i].clone()).collect();
            let t: Vec<Perm> = s.iter().map(|p| mu.then(p).then(&nu)).collect();
            let ks = canonical_subset(&SubsetKey::from_perms(&s).unwrap(), 4).unwrap();
            let kt = canonical_subset(&SubsetKey::from_perms(&t).unwrap(), 4).unwrap();
            prop_assert_eq!(ks.indices()[0], 0);
            prop_assert_eq!(ks, kt);
        }
    }
}
