//! Hill's method for the operator `𝒜 = −d²/dθ² I_k − 2𝕁 d/dθ + R/(1 + e cos θ)`
//! on ω-periodic functions: Morse index, nullity and generalized eigenvalues.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kepler_core::{r_kep, Eccentricity};
use crate::ode_engine::{jj, EssentialSystem};

/// Smallest admissible truncation.
pub const MIN_TRUNCATION: usize = 8;
/// Relative null tolerance, scaled by `‖R‖/(1 − e)` (see [`null_scale`]).
pub const DEFAULT_NULL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SturmLiouvilleSpec {
    e: Eccentricity,
    r: DMatrix<f64>,
}

impl SturmLiouvilleSpec {
    pub fn new(e: Eccentricity, r: DMatrix<f64>) -> Result<Self> {
        let k = r.nrows();
        if k == 0 || k % 2 != 0 || r.ncols() != k {
            return Err(Error::invalid(format!("R must be square of even size, got {}x{}", k, r.ncols())));
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("R has non-finite entries"));
        }
        if (&r - r.transpose()).amax() > 1e-12 * r.amax().max(1.0) {
            return Err(Error::invalid("R is not symmetric"));
        }
        Ok(SturmLiouvilleSpec { e, r })
    }

    pub fn kepler(e: Eccentricity) -> Self {
        let r = r_kep();
        SturmLiouvilleSpec {
            e,
            r: DMatrix::from_fn(2, 2, |i, j| r[(i, j)]),
        }
    }

    /// One spec per block of an essential system.
    pub fn from_system(sys: &EssentialSystem) -> Vec<Self> {
        sys.blocks()
            .iter()
            .map(|r| SturmLiouvilleSpec { e: sys.e(), r: r.clone() })
            .collect()
    }

    /// The block-diagonal operator of all blocks of `sys`.
    pub fn whole_system(sys: &EssentialSystem) -> Self {
        SturmLiouvilleSpec {
            e: sys.e(),
            r: crate::ode_engine::block_diag(sys.blocks()),
        }
    }

    pub fn k(&self) -> usize {
        self.r.nrows()
    }

    pub fn e(&self) -> Eccentricity {
        self.e
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }
}

/// Supported boundary multipliers `y(2π) = ω y(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Omega {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "-1")]
    MinusOne,
}

impl Omega {
    pub const BOTH: [Omega; 2] = [Omega::One, Omega::MinusOne];

    /// Fourier shift φ: modes are `e^{i(j + φ)θ}`.
    pub fn phi(self) -> f64 {
        match self {
            Omega::One => 0.0,
            Omega::MinusOne => 0.5,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Omega::One => 1.0,
            Omega::MinusOne => -1.0,
        }
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Omega::One => "1",
            Omega::MinusOne => "-1",
        })
    }
}

impl FromStr for Omega {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "+1" => Ok(Omega::One),
            "-1" => Ok(Omega::MinusOne),
            _ => Err(Error::Unsupported(format!("omega = {s}; only ±1 are supported"))),
        }
    }
}

/// Fourier coefficient `c_k` of `(1 + e cos θ)⁻¹`:
/// `(1 − e²)^{−1/2} (−q)^{|k|}` with `q = e/(1 + √(1 − e²))`.
pub fn fourier_coefficient(e: Eccentricity, k: i64) -> f64 {
    let e = e.get();
    let s = (1.0 - e * e).sqrt();
    let q = e / (1.0 + s);
    (-q).powi(k.unsigned_abs().min(i32::MAX as u64) as i32) / s
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillMatrix {
    pub omega: Omega,
    /// Modes `−K..=K`.
    pub truncation: usize,
    pub matrix: DMatrix<Complex64>,
}

impl HillMatrix {
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..=i {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn check_truncation(k_trunc: usize) -> Result<()> {
    if k_trunc >= MIN_TRUNCATION {
        Ok(())
    } else {
        Err(Error::invalid(format!("truncation K = {k_trunc} below {MIN_TRUNCATION}")))
    }
}

/// Toeplitz part `c_{j−j'} W`, plus the kinetic blocks when `kinetic`.
fn assemble(e: Eccentricity, w: &DMatrix<f64>, omega: Omega, k_trunc: usize, kinetic: bool) -> DMatrix<Complex64> {
    let k = w.nrows();
    let n = 2 * k_trunc + 1;
    let jk = jj(k);
    let coeffs: Vec<f64> = (0..n as i64).map(|d| fourier_coefficient(e, d)).collect();
    let mut h = DMatrix::<Complex64>::zeros(k * n, k * n);
    for a in 0..n {
        for b in 0..n {
            let c = coeffs[a.abs_diff(b)];
            for r in 0..k {
                for s in 0..k {
                    h[(a * k + r, b * k + s)] = Complex64::new(c * w[(r, s)], 0.0);
                }
            }
        }
        if kinetic {
            let nu = a as f64 - k_trunc as f64 + omega.phi();
            for r in 0..k {
                h[(a * k + r, a * k + r)] += nu * nu;
                for s in 0..k {
                    h[(a * k + r, a * k + s)] += Complex64::new(0.0, -2.0 * nu * jk[(r, s)]);
                }
            }
        }
    }
    h
}

/// Hill matrix of `𝒜` in the basis `e^{i(j + φ)θ} e_r`, `j = −K..=K`.
pub fn assemble_hill(spec: &SturmLiouvilleSpec, omega: Omega, k_trunc: usize) -> Result<HillMatrix> {
    check_truncation(k_trunc)?;
    Ok(HillMatrix {
        omega,
        truncation: k_trunc,
        matrix: assemble(spec.e, &spec.r, omega, k_trunc, true),
    })
}

/// Natural size of the zeroth-order term, `max(1, ‖R‖₂/(1 − e))`. The
/// largest Hill eigenvalue grows like K² and would swallow genuine small
/// eigenvalues if used as the scale.
pub fn null_scale(spec: &SturmLiouvilleSpec) -> f64 {
    let norm = spec.r.clone().singular_values().max();
    (norm / (1.0 - spec.e.get())).max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub morse: usize,
    pub nullity: usize,
    /// A few eigenvalues of smallest magnitude, ascending by magnitude.
    pub smallest_abs_eigs: Vec<f64>,
    pub truncation: usize,
    /// Absolute threshold actually used.
    pub tol: f64,
}

impl IndexResult {
    pub fn counts(&self) -> (usize, usize) {
        (self.morse, self.nullity)
    }
}

/// Index and nullity at a single truncation, with no convergence check.
pub fn index_at(spec: &SturmLiouvilleSpec, omega: Omega, k_trunc: usize, null_tol: f64) -> Result<IndexResult> {
    if !(null_tol > 0.0 && null_tol.is_finite()) {
        return Err(Error::invalid(format!("null tolerance {null_tol} must be positive")));
    }
    let h = assemble_hill(spec, omega, k_trunc)?;
    let ev = h.eigenvalues();
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver {
            matrix: h.matrix.map(|z| z.re),
        });
    }
    let tol = null_tol * null_scale(spec);
    let morse = ev.iter().filter(|&&x| x < -tol).count();
    let nullity = ev.iter().filter(|&&x| x.abs() <= tol).count();
    let mut small = ev.clone();
    small.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    small.truncate(6);
    Ok(IndexResult {
        morse,
        nullity,
        smallest_abs_eigs: small,
        truncation: k_trunc,
        tol,
    })
}

/// ω-Morse index and nullity, attested by agreement between K and 2K.
pub fn morse_index(spec: &SturmLiouvilleSpec, omega: Omega, k_trunc: usize, null_tol: f64) -> Result<IndexResult> {
    let coarse = index_at(spec, omega, k_trunc, null_tol)?;
    let fine = index_at(spec, omega, 2 * k_trunc, null_tol)?;
    if coarse.counts() != fine.counts() {
        return Err(Error::IndexNotConverged {
            k_coarse: k_trunc,
            k_fine: 2 * k_trunc,
            coarse: coarse.counts(),
            fine: fine.counts(),
        });
    }
    Ok(fine)
}

/// Default truncation: 128 for k = 2, 192 otherwise.
pub fn default_truncation(k: usize) -> usize {
    if k <= 2 {
        128
    } else {
        192
    }
}

/// [`morse_index`] at the default truncation, doubling K at most twice
/// when the K/2K check fails.
pub fn morse_index_auto(spec: &SturmLiouvilleSpec, omega: Omega, null_tol: f64) -> Result<IndexResult> {
    let mut k_trunc = default_truncation(spec.k());
    let mut last = None;
    for _ in 0..3 {
        match morse_index(spec, omega, k_trunc, null_tol) {
            Ok(r) => return Ok(r),
            Err(err @ Error::IndexNotConverged { .. }) => {
                last = Some(err);
                k_trunc *= 2;
            }
            Err(err) => return Err(err),
        }
    }
    Err(last.expect("loop ran"))
}

/// Index of a block-diagonal system as the sum over its blocks.
pub fn system_index(sys: &EssentialSystem, omega: Omega, k_trunc: usize, null_tol: f64) -> Result<IndexResult> {
    let mut total = IndexResult {
        morse: 0,
        nullity: 0,
        smallest_abs_eigs: Vec::new(),
        truncation: k_trunc,
        tol: 0.0,
    };
    for spec in SturmLiouvilleSpec::from_system(sys) {
        let r = morse_index(&spec, omega, k_trunc, null_tol)?;
        total.morse += r.morse;
        total.nullity += r.nullity;
        total.tol = total.tol.max(r.tol);
        total.truncation = r.truncation;
        total.smallest_abs_eigs.extend(r.smallest_abs_eigs);
    }
    total.smallest_abs_eigs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    total.smallest_abs_eigs.truncate(6);
    Ok(total)
}

/// Generalized eigenvalues κ of `(A_h + κ B_h)v = 0`, where `A_h` is the
/// Hill matrix of `base` and `B_h` that of the bump `weight/(1 + e cos θ)`.
/// Computed as reciprocals of the nonzero eigenvalues of `−B_h A_h⁻¹`,
/// sorted by |κ|.
pub fn generalized_eigs(
    base: &SturmLiouvilleSpec,
    weight: &DMatrix<f64>,
    omega: Omega,
    k_trunc: usize,
) -> Result<Vec<Complex64>> {
    check_truncation(k_trunc)?;
    if weight.shape() != base.r.shape() {
        return Err(Error::invalid("bump weight must match the size of R"));
    }
    if (weight - weight.transpose()).amax() > 1e-12 * weight.amax().max(1.0) {
        return Err(Error::invalid("bump weight is not symmetric"));
    }
    let a = assemble_hill(base, omega, k_trunc)?;
    let scale = null_scale(base);
    let tol = DEFAULT_NULL_TOL * scale;
    let min_abs = a.eigenvalues().iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if min_abs <= tol {
        return Err(Error::InvalidState(format!(
            "base operator is degenerate at omega = {omega} (|λ|min = {min_abs:e})"
        )));
    }
    if weight.amax() == 0.0 {
        return Ok(Vec::new());
    }
    let b = assemble(base.e, weight, omega, k_trunc, false);
    let a_inv = a
        .matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidState("base Hill matrix is singular".into()))?;
    let m = -(b * a_inv);
    let dim = m.nrows();
    let ev = nalgebra::linalg::Schur::try_new(m, 1e-15, 100 * dim)
        .ok_or_else(|| Error::Eigensolver {
            matrix: DMatrix::zeros(dim, dim),
        })?
        .eigenvalues()
        .ok_or_else(|| Error::Eigensolver {
            matrix: DMatrix::zeros(dim, dim),
        })?;
    let nu_max = ev.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let cut = 1e-12 * nu_max.max(f64::MIN_POSITIVE);
    let mut kappa: Vec<Complex64> = ev.iter().filter(|z| z.norm() > cut).map(|z| z.inv()).collect();
    kappa.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    Ok(kappa)
}

/// `Σ 1/κ²` over the generalized eigenvalues, i.e. `Tr(F²)` of the truncation.
pub fn inverse_square_sum(kappa: &[Complex64]) -> Complex64 {
    kappa.iter().map(|k| (k * k).inv()).sum()
}
