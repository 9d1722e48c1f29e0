//! Fundamental solutions and monodromy matrices of `γ' = J B(θ) γ` for
//! block-diagonal essential systems.

mod dop853;
mod tableau;

pub use dop853::{integrate, DenseOutput, Dop853Options, IntegratorStats, Solution};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kepler_core::Eccentricity;
use crate::symplectic_core::{
    classify_symplectic_spectrum, eigenvalues, is_linearly_stable, j_matrix, symplectic_defect, StabilityClass,
    DEFAULT_TOL,
};

/// `𝕁_k`: `k/2` copies of the 2x2 rotation generator on the diagonal.
pub fn jj(k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    for b in 0..k / 2 {
        m[(2 * b, 2 * b + 1)] = -1.0;
        m[(2 * b + 1, 2 * b)] = 1.0;
    }
    m
}

/// A non-autonomous linear Hamiltonian system made of independent blocks,
/// each `B(θ) = [[I, −𝕁], [𝕁, I − R/(1 + e cos θ)]]` with constant `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialSystem {
    e: Eccentricity,
    blocks: Vec<DMatrix<f64>>,
    label: String,
}

impl EssentialSystem {
    pub fn new(e: Eccentricity, blocks: Vec<DMatrix<f64>>, label: impl Into<String>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("an essential system needs at least one block"));
        }
        for r in &blocks {
            let k = r.nrows();
            if r.ncols() != k || !(k == 2 || k == 4) {
                return Err(Error::invalid(format!("block R must be 2x2 or 4x4, got {}x{}", k, r.ncols())));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("block R has non-finite entries"));
            }
            if (r - r.transpose()).amax() > 1e-12 * r.amax().max(1.0) {
                return Err(Error::invalid("block R must be symmetric"));
            }
        }
        Ok(EssentialSystem { e, blocks, label: label.into() })
    }

    pub fn kepler(e: Eccentricity) -> Self {
        let r = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[3.0, 0.0]));
        EssentialSystem { e, blocks: vec![r], label: "kepler".into() }
    }

    pub fn e(&self) -> Eccentricity {
        self.e
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// Phase-space dimension of each block.
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|r| 2 * r.nrows()).collect()
    }

    pub fn dim(&self) -> usize {
        self.block_dims().iter().sum()
    }

    pub fn b_block(&self, i: usize, theta: f64) -> DMatrix<f64> {
        block_b(self.e.get(), &self.blocks[i], theta)
    }

    /// Full block-diagonal `B(θ)`.
    pub fn b(&self, theta: f64) -> DMatrix<f64> {
        block_diag(&(0..self.blocks.len()).map(|i| self.b_block(i, theta)).collect::<Vec<_>>())
    }
}

pub(crate) fn block_b(e: f64, r: &DMatrix<f64>, theta: f64) -> DMatrix<f64> {
    let k = r.nrows();
    let s = 1.0 / (1.0 + e * theta.cos());
    let jk = jj(k);
    let mut b = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        b[(i, i)] = 1.0;
        for j in 0..k {
            b[(i, k + j)] = -jk[(i, j)];
            b[(k + i, j)] = jk[(i, j)];
            b[(k + i, k + j)] = if i == j { 1.0 } else { 0.0 } - r[(i, j)] * s;
        }
    }
    b
}

pub fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = DMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    m
}

/// Right-hand side of `γ' = J B(θ) γ` on a column-major `d x d` state.
fn fundamental_rhs(e: f64, r: &DMatrix<f64>) -> impl FnMut(f64, &[f64], &mut [f64]) + '_ {
    let d = 2 * r.nrows();
    let j = j_matrix(d);
    move |theta, y, dy| {
        let jb = &j * block_b(e, r, theta);
        let g = nalgebra::DMatrixView::from_slice(y, d, d);
        let out = jb * g;
        dy.copy_from_slice(out.as_slice());
    }
}

#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub theta_end: f64,
    pub matrix: DMatrix<f64>,
    pub stats: IntegratorStats,
    block_dims: Vec<usize>,
    dense: Vec<DenseOutput>,
}

impl FundamentalSolution {
    /// `γ(θ)` by interpolation of the accepted steps.
    pub fn at(&self, theta: f64) -> DMatrix<f64> {
        let blocks: Vec<DMatrix<f64>> = self
            .dense
            .iter()
            .zip(&self.block_dims)
            .map(|(dense, &d)| {
                let mut buf = vec![0.0; d * d];
                dense.eval(theta, &mut buf);
                DMatrix::from_column_slice(d, d, &buf)
            })
            .collect();
        block_diag(&blocks)
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }
}

fn check_tolerances(rel_tol: f64, abs_tol: f64) -> Result<()> {
    for (name, t) in [("rel_tol", rel_tol), ("abs_tol", abs_tol)] {
        if !(1e-14..=1e-3).contains(&t) {
            return Err(Error::invalid(format!("{name} = {t:e} outside [1e-14, 1e-3]")));
        }
    }
    Ok(())
}

/// Integrates each block of `γ' = J B γ`, `γ(0) = I`, up to `theta_end`.
pub fn integrate_fundamental(
    sys: &EssentialSystem,
    theta_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<FundamentalSolution> {
    integrate_between(sys, 0.0, theta_end, None, rel_tol, abs_tol, true)
}

/// Integrates from `theta_start` to `theta_end` with initial data `y0`
/// (identity when `None`); either direction is allowed.
pub fn integrate_between(
    sys: &EssentialSystem,
    theta_start: f64,
    theta_end: f64,
    y0: Option<&DMatrix<f64>>,
    rel_tol: f64,
    abs_tol: f64,
    dense: bool,
) -> Result<FundamentalSolution> {
    check_tolerances(rel_tol, abs_tol)?;
    let span = (theta_end - theta_start).abs();
    if !(span > 0.0 && span <= 2.0 * PI + 1e-12) {
        return Err(Error::invalid(format!(
            "integration span {span} must lie in (0, 2π]"
        )));
    }
    let opts = Dop853Options { rel_tol, abs_tol, dense, ..Default::default() };
    let e = sys.e.get();
    let mut stats = IntegratorStats::default();
    let mut mats = Vec::new();
    let mut denses = Vec::new();
    let mut off = 0;
    for r in &sys.blocks {
        let d = 2 * r.nrows();
        let init = match y0 {
            Some(m) => m.view((off, off), (d, d)).clone_owned(),
            None => DMatrix::identity(d, d),
        };
        off += d;
        let sol = integrate(fundamental_rhs(e, r), theta_start, theta_end, init.as_slice(), &opts)?;
        stats.merge(&sol.stats);
        mats.push(DMatrix::from_column_slice(d, d, &sol.y));
        if let Some(dn) = sol.dense {
            denses.push(dn);
        }
    }
    Ok(FundamentalSolution {
        theta_end,
        matrix: block_diag(&mats),
        stats,
        block_dims: sys.block_dims(),
        dense: denses,
    })
}

/// `max_θ ‖γ_Kep(θ) − γ_ode(θ)‖_∞` over `θ_i = 2πi/samples`, `i = 1..=samples`,
/// integrating grid point to grid point. The norm is the induced ∞-norm.
pub fn kepler_closed_form_deviation(e: Eccentricity, samples: usize, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let sys = EssentialSystem::kepler(e);
    let mut state = DMatrix::identity(4, 4);
    let mut worst = 0.0f64;
    let mut prev = 0.0;
    for i in 1..=samples {
        let theta = 2.0 * PI * i as f64 / samples as f64;
        state = integrate_between(&sys, prev, theta, Some(&state), rel_tol, abs_tol, false)?.matrix;
        prev = theta;
        let closed = crate::kepler_core::gamma_kep(e, theta).matrix;
        let dev = (0..4)
            .map(|r| (0..4).map(|c| (state[(r, c)] - closed[(r, c)]).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub dim: usize,
    /// Spectral class of the block; blocks larger than 4x4 use the
    /// generalized rule of [`classify_symplectic_spectrum`].
    pub class: Option<StabilityClass>,
    pub linearly_stable: bool,
    pub symplectic_defect: f64,
    pub eigenvalues: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub matrix: DMatrix<f64>,
    /// The class of the whole system when it is a single 4x4 block.
    pub classification: Option<StabilityClass>,
    pub blocks: Vec<BlockReport>,
    pub stats: IntegratorStats,
}

impl MonodromyResult {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.blocks
            .iter()
            .flat_map(|b| b.eigenvalues.iter().map(|&(re, im)| Complex64::new(re, im)))
            .collect()
    }

    pub fn all_linearly_stable(&self) -> bool {
        self.blocks.iter().all(|b| b.linearly_stable)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MonodromyOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub class_tol: f64,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        MonodromyOptions { rel_tol: 1e-12, abs_tol: 1e-12, class_tol: DEFAULT_TOL }
    }
}

pub fn monodromy(sys: &EssentialSystem) -> Result<MonodromyResult> {
    monodromy_with(sys, MonodromyOptions::default())
}

pub fn monodromy_with(sys: &EssentialSystem, opts: MonodromyOptions) -> Result<MonodromyResult> {
    let sol = integrate_between(sys, 0.0, 2.0 * PI, None, opts.rel_tol, opts.abs_tol, false)?;
    let mut blocks = Vec::new();
    let mut off = 0;
    for d in sys.block_dims() {
        let m = sol.matrix.view((off, off), (d, d)).clone_owned();
        off += d;
        let ev = eigenvalues(&m)?;
        let class = Some(classify_symplectic_spectrum(&ev, opts.class_tol));
        let defect = symplectic_defect(&m)?;
        let linearly_stable = is_linearly_stable(&m, opts.class_tol).unwrap_or(false);
        let mut ev: Vec<(f64, f64)> = ev.iter().map(|z| (z.re, z.im)).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        blocks.push(BlockReport { dim: d, class, linearly_stable, symplectic_defect: defect, eigenvalues: ev });
    }
    let classification = if blocks.len() == 1 { blocks[0].class } else { None };
    Ok(MonodromyResult { matrix: sol.matrix, classification, blocks, stats: sol.stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kepler_core::gamma_kep;

    fn ecc(e: f64) -> Eccentricity {
        Eccentricity::new(e).unwrap()
    }

    #[test]
    fn block_matches_kepler_b() {
        let sys = EssentialSystem::kepler(ecc(0.4));
        let b = sys.b(1.1);
        let k = crate::kepler_core::b_kep(ecc(0.4), 1.1);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(b[(i, j)], k[(i, j)]);
            }
        }
    }

    #[test]
    fn kepler_monodromy_matches_closed_form() {
        let sol = integrate_fundamental(&EssentialSystem::kepler(ecc(0.5)), 2.0 * PI, 1e-12, 1e-12).unwrap();
        let g = gamma_kep(ecc(0.5), 2.0 * PI).matrix;
        let diff = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (sol.matrix[(i, j)] - g[(i, j)]).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn kepler_deviation_on_grid() {
        for &e in &[0.0, 0.3, 0.6, 0.9] {
            let d = kepler_closed_form_deviation(ecc(e), 32, 1e-12, 1e-12).unwrap();
            assert!(d <= 1e-8, "e={e}: {d:e}");
        }
    }

    #[test]
    fn short_span_is_identity() {
        let sol = integrate_fundamental(&EssentialSystem::kepler(ecc(0.3)), 1e-10, 1e-12, 1e-12).unwrap();
        assert!((sol.matrix - DMatrix::identity(4, 4)).amax() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let sys = EssentialSystem::kepler(ecc(0.3));
        assert!(integrate_fundamental(&sys, 7.0, 1e-12, 1e-12).is_err());
        assert!(integrate_fundamental(&sys, 1.0, 1e-16, 1e-12).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(EssentialSystem::new(ecc(0.1), vec![asym], "x").is_err());
        assert!(EssentialSystem::new(ecc(0.1), vec![DMatrix::identity(3, 3)], "x").is_err());
    }

    #[test]
    fn jj_structure() {
        let j = jj(4);
        assert_eq!(j[(0, 1)], -1.0);
        assert_eq!(j[(3, 2)], 1.0);
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(4, 4));
    }
}
