//! Families of α-Erdős matrices, those with `Δ(A) = α`.
//!
//! Entries involve square roots, so everything here runs in [`HighFloat`]
//! and is checked against a tolerance [`EPS`].

mod highfloat;

use serde::Serialize;

pub use highfloat::{precision_bits, HighFloat, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};

use crate::bistoch::{brute_max, max_assignment};
use crate::exactalg::Perm;
use crate::{Error, Result};

/// Tolerance for every float comparison in this module.
pub const EPS: f64 = 1e-12;

fn eps() -> HighFloat {
    HighFloat::from_f64(EPS).unwrap()
}

fn hf(p: i64) -> HighFloat {
    HighFloat::from(p)
}

fn ratio(p: i64, q: i64) -> HighFloat {
    HighFloat::from_ratio(p, q)
}

fn sqrt(x: HighFloat, what: &str) -> Result<HighFloat> {
    if x.is_negative() && x.abs() <= eps() {
        return Ok(HighFloat::zero());
    }
    x.sqrt().ok_or_else(|| Error::Numeric(format!("negative radicand in {what}: {x}")))
}

/// Square matrix of [`HighFloat`] entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    rows: Vec<Vec<HighFloat>>,
}

impl FloatMatrix {
    pub fn new(rows: Vec<Vec<HighFloat>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        Ok(FloatMatrix { rows })
    }

    pub fn from_exact(m: &crate::ExactMatrix) -> Self {
        let rows = (0..m.rows()).map(|i| m.row(i).iter().map(HighFloat::from_rational).collect()).collect();
        FloatMatrix { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &HighFloat {
        &self.rows[i][j]
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.iter().map(HighFloat::to_f64).collect()).collect()
    }

    pub fn direct_sum_identity(&self, extra: usize) -> Self {
        let n = self.n() + extra;
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i < self.n(), j < self.n()) {
                        (true, true) => self.rows[i][j].clone(),
                        (false, false) if i == j => hf(1),
                        _ => HighFloat::zero(),
                    })
                    .collect()
            })
            .collect();
        FloatMatrix { rows }
    }

    /// `t·self + (1−t)·other`.
    pub fn lerp(&self, other: &FloatMatrix, t: &HighFloat) -> Self {
        let s = hf(1) - t;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| t * x + &s * y).collect())
            .collect();
        FloatMatrix { rows }
    }

    pub fn trace(&self) -> HighFloat {
        (0..self.n()).map(|i| &self.rows[i][i]).sum()
    }

    pub fn frobenius_sq(&self) -> HighFloat {
        self.rows.iter().flatten().map(|v| v * v).sum()
    }

    /// Maximal trace with its witness. Ties within [`EPS`] of the diagonal
    /// are reported as the identity.
    pub fn maxtrace(&self) -> (HighFloat, Perm) {
        let n = self.n();
        let (value, sigma) = if n <= 8 {
            brute_max(n, |i, j| self.rows[i][j].clone())
        } else {
            let a = max_assignment(n, |i, j| self.rows[i][j].clone());
            (a.value, Perm::from_images(a.cols).expect("assignment is a permutation"))
        };
        let trace = self.trace();
        if trace >= &value - &eps() {
            (value.max(trace), Perm::identity(n))
        } else {
            (value, sigma)
        }
    }

    pub fn delta(&self) -> HighFloat {
        self.maxtrace().0 - self.frobenius_sq()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    /// Largest deviation of a row or column sum from one.
    pub fn sum_error(&self) -> HighFloat {
        let n = self.n();
        let one = hf(1);
        let rows = self.rows.iter().map(|r| (r.iter().sum::<HighFloat>() - &one).abs());
        let cols = (0..n).map(|j| ((0..n).map(|i| &self.rows[i][j]).sum::<HighFloat>() - &one).abs());
        rows.chain(cols).fold(HighFloat::zero(), HighFloat::max)
    }

    pub fn min_entry(&self) -> HighFloat {
        self.rows.iter().flatten().cloned().reduce(HighFloat::min).unwrap_or_else(HighFloat::zero)
    }

    /// `M_n = (I_n + J_n) / 2`.
    pub fn midpoint(n: usize) -> Self {
        let off = ratio(1, 2 * n as i64);
        let diag = ratio(1, 2) + &off;
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { diag.clone() } else { off.clone() }).collect()).collect();
        FloatMatrix { rows }
    }
}

/// Verification summary of one family member.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    pub n: usize,
    pub alpha: f64,
    pub x: f64,
    pub z: f64,
    pub delta: f64,
    pub delta_error: f64,
    pub witness_is_identity: bool,
    pub symmetric: bool,
    pub sum_error: f64,
    pub min_entry: f64,
    /// `||A||² − (Trace(A) − α)`, zero for a member of the family.
    pub residual: f64,
}

impl AlphaReport {
    fn build(m: &FloatMatrix, alpha: &HighFloat, x: &HighFloat, z: &HighFloat) -> Self {
        let (mt, sigma) = m.maxtrace();
        let delta = mt - m.frobenius_sq();
        let residual = m.frobenius_sq() - (m.trace() - alpha);
        AlphaReport {
            n: m.n(),
            alpha: alpha.to_f64(),
            x: x.to_f64(),
            z: z.to_f64(),
            delta_error: (&delta - alpha).abs().to_f64(),
            delta: delta.to_f64(),
            witness_is_identity: sigma.is_identity(),
            symmetric: m.is_symmetric(),
            sum_error: m.sum_error().to_f64(),
            min_entry: m.min_entry().to_f64(),
            residual: residual.to_f64(),
        }
    }

    /// All invariants hold within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.delta_error <= tol
            && self.witness_is_identity
            && self.symmetric
            && self.sum_error <= tol
            && self.min_entry >= -tol
            && self.residual.abs() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct AlphaMember {
    pub x: HighFloat,
    pub z: HighFloat,
    pub matrix: FloatMatrix,
    pub report: AlphaReport,
}

fn check_x(x: &HighFloat, (a, b): &(HighFloat, HighFloat)) -> Result<()> {
    if *x < a - &eps() || *x > b + &eps() {
        return Err(Error::invalid(format!("x = {x} outside the interval [{a}, {b}]")));
    }
    Ok(())
}

/// Interval of admissible `x` for the 3×3 family at `α ∈ (0, 1/2)`.
pub fn interval3(alpha: &HighFloat) -> Result<(HighFloat, HighFloat)> {
    if *alpha <= HighFloat::zero() || *alpha >= ratio(1, 2) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1/2)")));
    }
    let b = ratio(2, 3) - sqrt(hf(1) - hf(2) * alpha, "interval3")? / hf(3);
    let a = if alpha * &hf(9) <= hf(2) {
        ratio(5, 12) - sqrt(hf(1) - hf(4) * alpha, "interval3")? / hf(12)
    } else {
        ratio(2, 3) - sqrt(hf(5) - hf(10) * alpha, "interval3")? / hf(6)
    };
    Ok((a, b))
}

/// The smaller root `z` of `10z² + (16x−14)z + (10x² − 16x + 6 + α) = 0`.
pub fn z_of_x3(alpha: &HighFloat, x: &HighFloat) -> Result<HighFloat> {
    check_x(x, &interval3(alpha)?)?;
    let disc = hf(-36) * x * x + hf(48) * x - hf(11) - hf(10) * alpha;
    Ok((hf(7) - hf(8) * x - sqrt(disc, "z_of_x3")?) / hf(10))
}

/// Residual of the defining quadratic of the 3×3 family.
pub fn quadratic_residual3(alpha: &HighFloat, x: &HighFloat, z: &HighFloat) -> HighFloat {
    hf(10) * z * z + (hf(16) * x - hf(14)) * z + (hf(10) * x * x - hf(16) * x + hf(6) + alpha)
}

/// Symmetric 3×3 matrix with `Δ = α`, for `x` in [`interval3`].
pub fn alpha_erdos3(alpha: &HighFloat, x: &HighFloat) -> Result<AlphaMember> {
    let z = z_of_x3(alpha, x)?;
    let w = hf(1) - x - &z;
    let c = hf(2) * x + hf(2) * &z - hf(1);
    let matrix = FloatMatrix::new(vec![
        vec![x.clone(), z.clone(), w.clone()],
        vec![z.clone(), x.clone(), w.clone()],
        vec![w.clone(), w, c],
    ])?;
    let report = AlphaReport::build(&matrix, alpha, x, &z);
    Ok(AlphaMember { x: x.clone(), z, matrix, report })
}

fn check_n_alpha(n: usize, alpha: &HighFloat) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!("family needs n >= 3, got {n}")));
    }
    if *alpha <= HighFloat::zero() || *alpha >= ratio(n as i64 - 1, 4) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, {}/4)", n - 1)));
    }
    Ok(())
}

/// Interval of admissible `x` for the `n×n` family at `α ∈ (0, (n−1)/4)`.
pub fn interval_n(n: usize, alpha: &HighFloat) -> Result<(HighFloat, HighFloat)> {
    check_n_alpha(n, alpha)?;
    let ni = n as i64;
    let nf = hf(ni);
    let tail = hf(ni - 1) - hf(4) * alpha;
    let b = (hf(ni + 1) - sqrt(hf(ni - 1) * &tail, "interval_n")?) / (hf(2) * &nf);
    let a = if alpha * &hf(4 * ni * ni) <= hf(ni * ni - 1) {
        (hf(2 * ni - 1) - sqrt(hf(1) - hf(4) * alpha, "interval_n")?) / hf(2 * ni * (ni - 1))
    } else {
        ratio(ni + 1, 2 * ni)
            - sqrt(hf(ni * ni - ni - 1) * &tail, "interval_n")?
                / (hf(2) * &nf * sqrt(hf(ni - 1), "interval_n")?)
    };
    Ok((a, b))
}

/// Off-diagonal value `z` of the leading block for the `n×n` family.
pub fn z_of_x_n(n: usize, alpha: &HighFloat, x: &HighFloat) -> Result<HighFloat> {
    check_x(x, &interval_n(n, alpha)?)?;
    let ni = n as i64;
    let (n2, n3) = (ni * ni, ni * ni * ni);
    let q = hf(n2 - ni - 1);
    let radicand = hf(-4 * n3) * x * x + hf(4 * n3) * x + hf(4 * n2) * x * x
        - hf(4 * ni) * x
        - hf(4) * alpha * &q
        + hf(-3 * n2 + ni + 2);
    let lead = (hf(2 * ni + 1) - hf(2 * (ni + 1)) * x) / (hf(2) * &q);
    let root = sqrt(radicand, "z_of_x_n")? / (hf(2) * &q * sqrt(hf(n2 - 3 * ni + 2), "z_of_x_n")?);
    Ok(lead - root)
}

/// Symmetric `n×n` matrix with `Δ = α`: diagonal `x` and off-diagonal `z`
/// on the leading `(n−1)`-block, last row and column completing the sums.
pub fn alpha_erdos_n(n: usize, alpha: &HighFloat, x: &HighFloat) -> Result<AlphaMember> {
    let z = z_of_x_n(n, alpha, x)?;
    let w = hf(1) - x - hf(n as i64 - 2) * &z;
    let c = hf(1) - hf(n as i64 - 1) * &w;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == n - 1, j == n - 1) {
                    (true, true) => c.clone(),
                    (true, false) | (false, true) => w.clone(),
                    _ if i == j => x.clone(),
                    _ => z.clone(),
                })
                .collect()
        })
        .collect();
    let matrix = FloatMatrix::new(rows)?;
    let report = AlphaReport::build(&matrix, alpha, x, &z);
    Ok(AlphaMember { x: x.clone(), z, matrix, report })
}

#[derive(Debug, Clone)]
pub struct SegmentPoint {
    pub t: HighFloat,
    pub matrix: FloatMatrix,
    pub delta: HighFloat,
}

/// Finds `t` with `Δ(t·(A3 ⊕ I) + (1−t)·M_n) = α` by bisection.
///
/// The endpoints have `Δ = (n−1)/4` at `t = 0` and `Δ(A3)` at `t = 1`;
/// `α` must lie strictly between them.
pub fn alpha_on_segment(n: usize, alpha: &HighFloat, a3: &FloatMatrix) -> Result<SegmentPoint> {
    if a3.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: a3.n() });
    }
    if n < 3 {
        return Err(Error::invalid(format!("segment needs n >= 3, got {n}")));
    }
    let tilde = a3.direct_sum_identity(n - 3);
    let mid = FloatMatrix::midpoint(n);
    let at = |t: &HighFloat| {
        let m = tilde.lerp(&mid, t);
        let d = m.delta();
        (m, d)
    };
    let (d0, d1) = (at(&HighFloat::zero()).1, at(&hf(1)).1);
    let tol = eps();
    if !(*alpha < &d0 - &tol && *alpha > &d1 + &tol) {
        return Err(Error::invalid(format!("alpha = {alpha} not strictly between {d1} and {d0}")));
    }
    // f(t) = Δ(t) − α is positive at 0 and negative at 1.
    let (mut lo, mut hi) = (HighFloat::zero(), hf(1));
    let half = ratio(1, 2);
    for _ in 0..200 {
        let t = (&lo + &hi) * &half;
        let (m, d) = at(&t);
        let f = &d - alpha;
        if f.abs() <= tol {
            return Ok(SegmentPoint { t, matrix: m, delta: d });
        }
        if f.is_negative() {
            hi = t;
        } else {
            lo = t;
        }
    }
    Err(Error::Numeric("bisection did not converge".into()))
}
