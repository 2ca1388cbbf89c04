//! Enumeration of Erdős matrices through Gram systems.
//!
//! For a linearly independent set of permutation matrices `P_1..P_k` with
//! Gram matrix `M`, the only candidate Erdős matrix supported on exactly that
//! set is `Σ x_i P_i` with `x = M⁻¹1 / <1, M⁻¹1>`, provided all `x_i > 0`.
//! Running this over every subset containing the identity finds every class
//! of Erdős matrices under `A ~ PAQ`.
//!
//! The exact pipeline is [`candidate_from_subset`]. [`enumerate_erdos`] runs
//! the same pipeline on small integers: `M` is nonsingular exactly when the
//! set is independent, and a fraction-free solve gives `y = w / det` so the
//! candidate is `N / D` with `N = Σ |w_i| P_i`, `D = Σ |w_i|`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::bistoch::{brute_max, canonical_form, canonical_grid, delta, transpose_class_merge, BistochMatrix};
use crate::exactalg::{bareiss_solve, perm_to_matrix, rank, solve_linear, ExactMatrix, Perm, Rational};
use crate::format::Record;
use crate::{Error, Result};

/// `M(i,j) = <P_i, P_j>_F`, the number of positions where `σ_i` and `σ_j` agree.
pub fn gram(perms: &[Perm]) -> ExactMatrix {
    let k = perms.len();
    let mut m = ExactMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, Rational::from(coincidences(&perms[i], &perms[j]) as i64));
        }
    }
    m
}

fn coincidences(a: &Perm, b: &Perm) -> usize {
    a.images().iter().zip(b.images()).filter(|(x, y)| x == y).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetRecord {
    /// Sorted; the identity, when present, comes first.
    pub perms: Vec<Perm>,
    pub independent: bool,
    pub gram_solution: Option<Vec<Rational>>,
    pub positive: bool,
    pub candidate: Option<BistochMatrix>,
    pub erdos: bool,
}

/// Runs the exact pipeline on one set of permutations.
pub fn candidate_from_subset(perms: &[Perm]) -> Result<SubsetRecord> {
    let Some(first) = perms.first() else {
        return Err(Error::invalid("empty permutation set"));
    };
    let n = first.len();
    if perms.iter().any(|p| p.len() != n) {
        return Err(Error::invalid("permutations of different sizes"));
    }
    let mut perms = perms.to_vec();
    perms.sort();
    if perms.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("repeated permutation"));
    }
    let k = perms.len();
    let vectors: Vec<Vec<Rational>> = perms.iter().map(|p| perm_to_matrix(p).entries().to_vec()).collect();
    let independent = rank(&ExactMatrix::from_rows(vectors)?) == k;
    let mut rec =
        SubsetRecord { perms, independent, gram_solution: None, positive: false, candidate: None, erdos: false };
    if !independent {
        return Ok(rec);
    }
    let y = solve_linear(&gram(&rec.perms), &vec![Rational::one(); k]).unique().expect("independent set");
    rec.positive = y.iter().all(Rational::is_positive);
    if rec.positive {
        let total: Rational = y.iter().sum();
        let mut m = ExactMatrix::zeros(n, n);
        for (p, yi) in rec.perms.iter().zip(&y) {
            let x = yi / &total;
            for i in 0..n {
                let j = p.apply(i);
                m.set(i, j, m.get(i, j) + &x);
            }
        }
        let cand = BistochMatrix::new(m)?;
        rec.erdos = delta(&cand).is_erdos;
        rec.candidate = Some(cand);
    }
    rec.gram_solution = Some(y);
    Ok(rec)
}

/// Counts for one subset size, in the layout of the summary table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct KStats {
    pub k: usize,
    pub total: u64,
    pub independent: u64,
    pub positive: u64,
    pub erdos: u64,
    pub classes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub rows: Vec<KStats>,
}

impl EnumStats {
    pub fn row(&self, k: usize) -> Option<&KStats> {
        self.rows.iter().find(|r| r.k == k)
    }

    /// Tab-separated, with header `k total independent positive erdos classes`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("k\ttotal\tindependent\tpositive\terdos\tclasses\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.k, r.total, r.independent, r.positive, r.erdos, r.classes
            ));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub n: usize,
    /// Canonical forms, sorted.
    pub classes: Vec<BistochMatrix>,
    pub stats: EnumStats,
}

impl Enumeration {
    pub fn classes_up_to_transpose(&self) -> Vec<BistochMatrix> {
        transpose_class_merge(&self.classes)
    }
}

type Grid = Vec<Vec<i128>>;

#[derive(Default)]
struct Partial {
    total: u64,
    independent: u64,
    positive: u64,
    erdos: u64,
    forms: BTreeSet<Grid>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.total += other.total;
        self.independent += other.independent;
        self.positive += other.positive;
        self.erdos += other.erdos;
        self.forms.extend(other.forms);
        self
    }
}

struct Context {
    n: usize,
    perms: Vec<Perm>,
    gram: Vec<Vec<i128>>,
}

impl Context {
    fn new(n: usize) -> Self {
        let perms = Perm::all(n);
        let gram =
            perms.iter().map(|a| perms.iter().map(|b| coincidences(a, b) as i128).collect()).collect();
        Context { n, perms, gram }
    }

    fn visit(&self, idx: &[usize], acc: &mut Partial) {
        acc.total += 1;
        let k = idx.len();
        let m: Vec<Vec<i128>> = idx.iter().map(|&a| idx.iter().map(|&b| self.gram[a][b]).collect()).collect();
        let Some((det, w)) = bareiss_solve(&m, &vec![1i128; k]) else {
            return;
        };
        acc.independent += 1;
        if !w.iter().all(|wi| wi.signum() == det.signum()) {
            return;
        }
        acc.positive += 1;
        let n = self.n;
        let mut grid = vec![vec![0i128; n]; n];
        let mut d = 0i128;
        for (&a, wi) in idx.iter().zip(&w) {
            let wi = wi.abs();
            d += wi;
            for (i, &j) in self.perms[a].images().iter().enumerate() {
                grid[i][j] += wi;
            }
        }
        let frob: i128 = grid.iter().flatten().map(|v| v * v).sum();
        let (mt, _) = brute_max(n, |i, j| grid[i][j]);
        if mt * d != frob {
            return;
        }
        acc.erdos += 1;
        let g = grid.iter().flatten().fold(0i128, |g, &v| num_integer::gcd(g, v));
        for v in grid.iter_mut().flatten() {
            *v /= g;
        }
        acc.forms.insert(canonical_grid(&grid));
    }

    /// All subsets of size `k` containing the identity (index 0), split by
    /// their second element for parallelism.
    fn run_k(&self, k: usize) -> Partial {
        let total = self.perms.len();
        if k == 1 {
            let mut acc = Partial::default();
            self.visit(&[0], &mut acc);
            return acc;
        }
        (1..total)
            .into_par_iter()
            .map(|second| {
                let mut acc = Partial::default();
                let mut idx = vec![0, second];
                for_each_combination(second + 1, total, k - 2, &mut idx, &mut |idx| self.visit(idx, &mut acc));
                acc
            })
            .reduce(Partial::default, Partial::merge)
    }
}

/// Calls `f` with `prefix` extended by every `r`-combination of `lo..hi`,
/// in lexicographic order.
fn for_each_combination(lo: usize, hi: usize, r: usize, prefix: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if r == 0 {
        f(prefix);
        return;
    }
    for a in lo..=hi.saturating_sub(r) {
        prefix.push(a);
        for_each_combination(a + 1, hi, r - 1, prefix, f);
        prefix.pop();
    }
}

fn grid_to_bistoch(grid: &Grid) -> BistochMatrix {
    let d: i128 = grid[0].iter().sum();
    let rows = grid
        .iter()
        .map(|r| r.iter().map(|&v| Rational::new(v, d)).collect())
        .collect();
    BistochMatrix::new(ExactMatrix::from_rows(rows).expect("square")).expect("candidates are bistochastic")
}

/// Every class of `n×n` Erdős matrices, for `n` in `{3, 4}`.
///
/// `workers = 0` uses the global thread pool.
pub fn enumerate_erdos(n: usize, workers: usize) -> Result<Enumeration> {
    if n >= 5 {
        return Err(Error::Unsupported(format!(
            "enumeration for n = {n}: the number of subsets of S_{n} becomes prohibitively large (supported: 3, 4)"
        )));
    }
    if n < 3 {
        return Err(Error::Unsupported(format!("enumeration for n = {n} (supported: 3, 4)")));
    }
    let ctx = Context::new(n);
    let run = || {
        let mut all = BTreeSet::new();
        let mut rows = Vec::new();
        for k in 1..=(n - 1) * (n - 1) + 1 {
            let p = ctx.run_k(k);
            debug_assert!(p.total >= p.independent && p.independent >= p.positive && p.positive >= p.erdos);
            rows.push(KStats {
                k,
                total: p.total,
                independent: p.independent,
                positive: p.positive,
                erdos: p.erdos,
                classes: p.forms.len() as u64,
            });
            all.extend(p.forms);
        }
        (all, rows)
    };
    let (forms, rows) = if workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run)
    };
    let mut classes: Vec<BistochMatrix> = forms.iter().map(grid_to_bistoch).collect();
    classes.sort();
    Ok(Enumeration { n, classes, stats: EnumStats { rows } })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppendixReport {
    pub matrices: usize,
    pub all_erdos: bool,
    pub pairwise_inequivalent: bool,
    pub matches_enumeration: bool,
    pub classes_up_to_transpose: usize,
}

/// Checks a catalogue of matrices against an enumeration: every entry must
/// be a bistochastic Erdős matrix, entries must be pairwise inequivalent, and
/// their classes must be exactly `classes`. Failures name the record index.
pub fn verify_appendix(records: &[Record], classes: &[BistochMatrix]) -> Result<AppendixReport> {
    let label = |pos: usize, r: &Record| r.index.unwrap_or(pos + 1);
    let mut seen = std::collections::BTreeMap::new();
    let mut matrices = Vec::with_capacity(records.len());
    for (pos, r) in records.iter().enumerate() {
        let i = label(pos, r);
        let a = BistochMatrix::new(r.matrix.clone())
            .map_err(|e| Error::CheckFailed(format!("matrix {i}: {e}")))?;
        let c = delta(&a);
        if !c.is_erdos {
            return Err(Error::CheckFailed(format!("matrix {i}: delta = {} is not zero", c.delta)));
        }
        if let Some(j) = seen.insert(canonical_form(&a), i) {
            return Err(Error::CheckFailed(format!("matrix {i} is equivalent to matrix {j}")));
        }
        matrices.push(a);
    }
    let expected: BTreeSet<&BistochMatrix> = classes.iter().collect();
    if let Some((_, i)) = seen.iter().find(|(c, _)| !expected.contains(c)) {
        return Err(Error::CheckFailed(format!("matrix {i} is not among the enumerated classes")));
    }
    if seen.len() != expected.len() {
        return Err(Error::CheckFailed(format!(
            "catalogue has {} classes, enumeration has {}",
            seen.len(),
            expected.len()
        )));
    }
    Ok(AppendixReport {
        matrices: matrices.len(),
        all_erdos: true,
        pairwise_inequivalent: true,
        matches_enumeration: true,
        classes_up_to_transpose: transpose_class_merge(&matrices).len(),
    })
}
