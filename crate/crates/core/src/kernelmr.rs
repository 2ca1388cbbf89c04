//! Dyadic discretisation of bistochastic kernels on `[0,1]²`.
//!
//! Averaging a kernel `W` over the cells of the level-`m` dyadic grid gives a
//! step kernel `W_m`, and `A = 2^-m · W_m` is a `2^m × 2^m` bistochastic
//! matrix with `||A||_F² = ||W_m||²_{L²}`. The checks here run the
//! Marcus–Ree inequality and the coupling inequality on those matrices.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bistoch::max_assignment;
use crate::format::KernelSpec;
use crate::{Error, Result};

/// Tolerance used by every check in this module.
pub const TOL: f64 = 1e-9;
/// Largest supported level (grids up to 1024 × 1024).
pub const MAX_LEVEL: u32 = 10;

/// A nonnegative kernel on `[0,1]²`.
pub trait KernelFn: Send + Sync {
    fn eval(&self, x: f64, y: f64) -> Result<f64>;

    /// `∫∫ W` over `[x0,x1] × [y0,y1]`, when known in closed form.
    fn cell_integral(&self, _x: (f64, f64), _y: (f64, f64)) -> Option<f64> {
        None
    }

    fn name(&self) -> String;
}

fn check_unit(x: f64, y: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        Ok(())
    } else {
        Err(Error::invalid(format!("kernel evaluated outside [0,1]²: ({x}, {y})")))
    }
}

pub struct Uniform;

impl KernelFn for Uniform {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x, y)?;
        Ok(1.0)
    }

    fn cell_integral(&self, x: (f64, f64), y: (f64, f64)) -> Option<f64> {
        Some((x.1 - x.0) * (y.1 - y.0))
    }

    fn name(&self) -> String {
        "uniform".into()
    }
}

/// `1 + ε·cos(2πx)·cos(2πy)` with `|ε| <= 1`.
pub struct Cosine {
    eps: f64,
}

impl Cosine {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps.abs() > 1.0 {
            return Err(Error::invalid(format!("cosine amplitude {eps} outside [-1, 1]")));
        }
        Ok(Cosine { eps })
    }
}

impl KernelFn for Cosine {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x, y)?;
        Ok(1.0 + self.eps * (2.0 * PI * x).cos() * (2.0 * PI * y).cos())
    }

    fn cell_integral(&self, x: (f64, f64), y: (f64, f64)) -> Option<f64> {
        let prim = |(a, b): (f64, f64)| ((2.0 * PI * b).sin() - (2.0 * PI * a).sin()) / (2.0 * PI);
        Some((x.1 - x.0) * (y.1 - y.0) + self.eps * prim(x) * prim(y))
    }

    fn name(&self) -> String {
        format!("cosine:{}", self.eps)
    }
}

/// Piecewise-constant kernel on an `s × s` grid of equal cells.
#[derive(Debug, Clone)]
pub struct StepKernel {
    size: usize,
    values: Vec<f64>,
    label: String,
}

impl StepKernel {
    pub fn new(size: usize, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if size == 0 || values.len() != size * size {
            return Err(Error::DimensionMismatch { expected: size * size, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("step kernel values must be finite and nonnegative"));
        }
        Ok(StepKernel { size, values, label: label.into() })
    }

    /// Positive random grid of side `2^p`, `p ∈ 1..=3`, scaled by alternating
    /// row and column normalisation until every mean is within `1e-10` of 1.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = 1usize << rng.gen_range(1..=3);
        let mut v: Vec<f64> = (0..size * size).map(|_| rng.gen_range(0.05..1.0)).collect();
        sinkhorn(&mut v, size, 1e-10);
        StepKernel { size, values: v, label: format!("random:{seed}") }
    }

    fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.size + b]
    }
}

/// Scales rows and columns of a positive `n × n` grid to mean 1.
fn sinkhorn(v: &mut [f64], n: usize, tol: f64) {
    for _ in 0..10_000 {
        for r in v.chunks_mut(n) {
            let mean = r.iter().sum::<f64>() / n as f64;
            r.iter_mut().for_each(|x| *x /= mean);
        }
        let mut worst = 0.0f64;
        for c in 0..n {
            let mean = (0..n).map(|r| v[r * n + c]).sum::<f64>() / n as f64;
            (0..n).for_each(|r| v[r * n + c] /= mean);
            worst = worst.max((mean - 1.0).abs());
        }
        if worst <= tol {
            let row_worst =
                v.chunks(n).map(|r| (r.iter().sum::<f64>() / n as f64 - 1.0).abs()).fold(0.0, f64::max);
            if row_worst <= tol {
                return;
            }
        }
    }
}

impl KernelFn for StepKernel {
    fn eval(&self, x: f64, y: f64) -> Result<f64> {
        check_unit(x, y)?;
        let idx = |t: f64| ((t * self.size as f64) as usize).min(self.size - 1);
        Ok(self.at(idx(x), idx(y)))
    }

    fn cell_integral(&self, x: (f64, f64), y: (f64, f64)) -> Option<f64> {
        let s = self.size as f64;
        let overlap = |(lo, hi): (f64, f64), a: usize| {
            let (c0, c1) = (a as f64 / s, (a + 1) as f64 / s);
            (hi.min(c1) - lo.max(c0)).max(0.0)
        };
        let span = |(lo, hi): (f64, f64)| {
            let first = ((lo * s).floor() as usize).min(self.size - 1);
            let last = ((hi * s).ceil() as usize).clamp(first + 1, self.size);
            first..last
        };
        let mut total = 0.0;
        for a in span(x) {
            let ox = overlap(x, a);
            for b in span(y) {
                total += self.at(a, b) * ox * overlap(y, b);
            }
        }
        Some(total)
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

pub fn kernel_from_spec(spec: &KernelSpec) -> Result<Box<dyn KernelFn>> {
    Ok(match *spec {
        KernelSpec::Uniform => Box::new(Uniform),
        KernelSpec::Cosine(eps) => Box::new(Cosine::new(eps)?),
        KernelSpec::Random(seed) => Box::new(StepKernel::random(seed)),
    })
}

/// Cell averages of a kernel on the level-`m` dyadic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicGrid {
    m: u32,
    values: Vec<f64>,
}

impl DyadicGrid {
    pub fn new(m: u32, values: Vec<f64>) -> Result<Self> {
        let side = 1usize << m;
        if m > MAX_LEVEL || values.len() != side * side {
            return Err(Error::DimensionMismatch { expected: side * side, found: values.len() });
        }
        Ok(DyadicGrid { m, values })
    }

    /// Step kernel of the identity coupling: `2^m` on diagonal cells.
    pub fn identity_coupling(m: u32) -> Self {
        let side = 1usize << m;
        let mut values = vec![0.0; side * side];
        for i in 0..side {
            values[i * side + i] = side as f64;
        }
        DyadicGrid { m, values }
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn side(&self) -> usize {
        1 << self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.side() + j]
    }

    pub fn transpose(&self) -> Self {
        let n = self.side();
        let values = (0..n * n).map(|k| self.get(k % n, k / n)).collect();
        DyadicGrid { m: self.m, values }
    }

    /// `A = 2^-m · W_m`.
    pub fn induced_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.side();
        let w = 1.0 / n as f64;
        self.values.chunks(n).map(|r| r.iter().map(|v| v * w).collect()).collect()
    }

    /// `||W_m||²_{L²} = 4^-m Σ W_m²`, equal to `||A||_F²`.
    pub fn l2_sq(&self) -> f64 {
        let n = self.side() as f64;
        self.values.iter().map(|v| v * v).sum::<f64>() / (n * n)
    }

    /// Averages 2×2 blocks, giving the grid one level up.
    pub fn coarsen(&self) -> Result<Self> {
        if self.m == 0 {
            return Err(Error::invalid("level 0 has no coarser grid"));
        }
        let n = self.side() / 2;
        let values = (0..n * n)
            .map(|k| {
                let (i, j) = (2 * (k / n), 2 * (k % n));
                (self.get(i, j) + self.get(i + 1, j) + self.get(i, j + 1) + self.get(i + 1, j + 1)) / 4.0
            })
            .collect();
        Ok(DyadicGrid { m: self.m - 1, values })
    }

    /// Largest deviation of a row or column sum of the induced matrix from 1.
    pub fn sum_error(&self) -> f64 {
        let a = self.induced_matrix();
        let n = a.len();
        let rows = a.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs());
        let cols = (0..n).map(|j| ((0..n).map(|i| a[i][j]).sum::<f64>() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// The bistochastic matrix `2^-m · W_m` of a grid.
pub fn grid_to_bistoch(g: &DyadicGrid) -> Vec<Vec<f64>> {
    g.induced_matrix()
}

/// Cell averages at level `m`, using closed-form cell integrals when the
/// kernel has them and an `s × s` midpoint rule otherwise.
pub fn dyadic_average(w: &dyn KernelFn, m: u32, s: usize) -> Result<DyadicGrid> {
    if m > MAX_LEVEL {
        return Err(Error::Unsupported(format!("level {m} > {MAX_LEVEL}")));
    }
    if s == 0 {
        return Err(Error::invalid("need at least one sample per cell side"));
    }
    let n = 1usize << m;
    let h = 1.0 / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (x, y) = ((i as f64 * h, (i + 1) as f64 * h), (j as f64 * h, (j + 1) as f64 * h));
                    if let Some(v) = w.cell_integral(x, y) {
                        return Ok(v / (h * h));
                    }
                    let mut acc = 0.0;
                    for a in 0..s {
                        for b in 0..s {
                            let px = x.0 + (a as f64 + 0.5) * h / s as f64;
                            let py = y.0 + (b as f64 + 0.5) * h / s as f64;
                            acc += w.eval(px, py)?;
                        }
                    }
                    Ok(acc / (s * s) as f64)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    DyadicGrid::new(m, rows.concat())
}

fn float_maxtrace(a: &[Vec<f64>]) -> f64 {
    max_assignment(a.len(), |i, j| a[i][j]).value
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteMrReport {
    pub m: u32,
    pub frobenius_sq: f64,
    pub maxtrace: f64,
    pub trace: f64,
    pub sum_error: f64,
    pub holds: bool,
}

/// `||A||_F² <= maxtrace(A) + tol` for the induced matrix.
pub fn check_finite_mr(g: &DyadicGrid, tol: f64) -> FiniteMrReport {
    let a = g.induced_matrix();
    let frob: f64 = a.iter().flatten().map(|v| v * v).sum();
    let mt = float_maxtrace(&a);
    FiniteMrReport {
        m: g.m,
        frobenius_sq: frob,
        maxtrace: mt,
        trace: (0..a.len()).map(|i| a[i][i]).sum(),
        sum_error: g.sum_error(),
        holds: frob <= mt + tol,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub m: u32,
    pub pairing: f64,
    pub maxtrace: f64,
    pub holds: bool,
}

/// `<A, B>_F <= maxtrace(A) + tol` for the matrices induced by two grids.
pub fn check_coupling_mr(gw: &DyadicGrid, gv: &DyadicGrid, tol: f64) -> Result<CouplingReport> {
    if gw.m != gv.m {
        return Err(Error::DimensionMismatch { expected: gw.m as usize, found: gv.m as usize });
    }
    Ok(coupling(gw, gv, float_maxtrace(&gw.induced_matrix()), tol))
}

fn coupling(gw: &DyadicGrid, gv: &DyadicGrid, mt: f64, tol: f64) -> CouplingReport {
    let scale = 1.0 / (gw.side() * gv.side()) as f64;
    let pairing = gw.values.iter().zip(&gv.values).map(|(x, y)| x * y).sum::<f64>() * scale;
    CouplingReport { m: gw.m, pairing, maxtrace: mt, holds: pairing <= mt + tol }
}

/// Largest `|W_{m+1} − W_m|` over cells, a proxy for uniform convergence.
pub fn refinement_deviation(fine: &DyadicGrid, coarse: &DyadicGrid) -> Result<f64> {
    if fine.m != coarse.m + 1 {
        return Err(Error::invalid("grids are not consecutive levels"));
    }
    let n = fine.side();
    Ok((0..n * n).map(|k| (fine.values[k] - coarse.get(k / n / 2, k % n / 2)).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheckReport {
    pub kernel: String,
    pub m: u32,
    pub finite: FiniteMrReport,
    pub coupling_identity: CouplingReport,
    pub coupling_transpose: CouplingReport,
    /// Largest difference between the coarsened level-`m` grid and the level `m−1` grid.
    pub tower_error: f64,
    /// `|W_{j+1} − W_j|` for `j = 0..m`.
    pub refinement: Vec<f64>,
    pub passed: bool,
}

/// All kernel checks at level `m`.
pub fn kernel_check(w: &dyn KernelFn, m: u32, samples: usize) -> Result<KernelCheckReport> {
    let grids = (0..=m).map(|j| dyadic_average(w, j, samples)).collect::<Result<Vec<_>>>()?;
    let g = &grids[m as usize];
    let finite = check_finite_mr(g, TOL);
    let coupling_identity = coupling(g, &DyadicGrid::identity_coupling(m), finite.maxtrace, TOL);
    let coupling_transpose = coupling(g, &g.transpose(), finite.maxtrace, TOL);
    let tower_error = if m == 0 {
        0.0
    } else {
        let c = g.coarsen()?;
        c.values.iter().zip(&grids[m as usize - 1].values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let refinement =
        grids.windows(2).map(|w| refinement_deviation(&w[1], &w[0])).collect::<Result<Vec<_>>>()?;
    let passed = finite.holds
        && finite.sum_error <= TOL
        && coupling_identity.holds
        && coupling_transpose.holds
        && tower_error <= 1e-12;
    Ok(KernelCheckReport {
        kernel: w.name(),
        m,
        finite,
        coupling_identity,
        coupling_transpose,
        tower_error,
        refinement,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_gives_j() {
        for m in 0..=4 {
            let g = dyadic_average(&Uniform, m, 1).unwrap();
            assert!(g.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
            let a = grid_to_bistoch(&g);
            let n = a.len() as f64;
            assert!(a.iter().flatten().all(|&v| (v - 1.0 / n).abs() < 1e-15));
            let r = check_finite_mr(&g, TOL);
            assert!(r.holds && (r.frobenius_sq - 1.0).abs() < 1e-12 && (r.maxtrace - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_values() {
        let k = Cosine::new(0.5).unwrap();
        let g = dyadic_average(&k, 6, 8).unwrap();
        assert!(g.sum_error() <= 1e-9);
        let frob: f64 = g.induced_matrix().iter().flatten().map(|v| v * v).sum();
        assert!((frob - g.l2_sq()).abs() < 1e-12);
        assert!((frob - (1.0 + 0.25 / 4.0)).abs() < 1e-3, "{frob}");
        let r = check_finite_mr(&g, TOL);
        assert!(r.holds);
        assert!((r.trace - 1.25).abs() < 1e-3 && r.maxtrace >= r.trace - 1e-12, "{r:?}");
    }

    #[test]
    fn analytic_matches_midpoint_rule() {
        struct Sampled(Cosine);
        impl KernelFn for Sampled {
            fn eval(&self, x: f64, y: f64) -> Result<f64> {
                self.0.eval(x, y)
            }
            fn name(&self) -> String {
                "sampled".into()
            }
        }
        let exact = dyadic_average(&Cosine::new(0.5).unwrap(), 3, 1).unwrap();
        let sampled = dyadic_average(&Sampled(Cosine::new(0.5).unwrap()), 3, 64).unwrap();
        let err = exact.values.iter().zip(&sampled.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn tower_property_and_refinement() {
        for w in [Box::new(Cosine::new(1.0).unwrap()) as Box<dyn KernelFn>, Box::new(StepKernel::random(3))] {
            let r = kernel_check(w.as_ref(), 6, 4).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = kernel_check(&Cosine::new(0.5).unwrap(), 7, 1).unwrap();
        assert!(r.refinement[1..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)), "{:?}", r.refinement);
    }

    #[test]
    fn identity_coupling_pairs_to_trace() {
        let g = dyadic_average(&Cosine::new(0.25).unwrap(), 4, 1).unwrap();
        let r = check_coupling_mr(&g, &DyadicGrid::identity_coupling(4), TOL).unwrap();
        let trace: f64 = (0..16).map(|i| g.get(i, i) / 16.0).sum();
        assert!((r.pairing - trace).abs() < 1e-12 && r.holds);
        assert!(check_coupling_mr(&g, &DyadicGrid::identity_coupling(3), TOL).is_err());
    }

    #[test]
    fn random_kernels_are_bistochastic_and_deterministic() {
        for seed in 0..20 {
            let k = StepKernel::random(seed);
            let g = dyadic_average(&k, 4, 1).unwrap();
            assert!(g.sum_error() <= 1e-9, "seed {seed}");
            assert_eq!(dyadic_average(&StepKernel::random(seed), 4, 1).unwrap(), g);
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(Cosine::new(1.5).is_err());
        assert!(Uniform.eval(1.5, 0.0).is_err());
        assert!(dyadic_average(&Uniform, 11, 1).is_err());
        assert!(dyadic_average(&Uniform, 2, 0).is_err());
        assert!(StepKernel::new(2, vec![1.0; 3], "x").is_err());
    }
}
