//! Predicates on real symplectic matrices: the symplectic check, the
//! symplectic sum, eigenvalue clustering and the 4x4 stability classes.

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Default tolerance for the unit-circle and real-axis bands.
pub const DEFAULT_TOL: f64 = 1e-7;

/// The standard symplectic matrix `[[0, -I], [I, 0]]` of size `dim`.
pub fn j_matrix(dim: usize) -> DMatrix<f64> {
    let n = dim / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

fn check_even_square(m: &DMatrix<f64>) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::invalid(format!("matrix is {r}x{c}, not square")));
    }
    if r == 0 || r % 2 == 1 {
        return Err(Error::invalid(format!("dimension {r} is not a positive even number")));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(r)
}

/// Max-entry norm of `MᵀJM − J`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> Result<f64> {
    let dim = check_even_square(m)?;
    let j = j_matrix(dim);
    Ok((m.transpose() * &j * m - j).amax())
}

pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    Ok(symplectic_defect(m)? <= tol)
}

/// Symplectic sum. With `M1 = [[A1, B1], [C1, D1]]` and `M2` likewise,
/// `M1 ⋄ M2 = [[A1, 0, B1, 0], [0, A2, 0, B2], [C1, 0, D1, 0], [0, C2, 0, D2]]`.
pub fn diamond(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d1 = check_even_square(m1)?;
    let d2 = check_even_square(m2)?;
    let (i, j) = (d1 / 2, d2 / 2);
    let n = i + j;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..d1 {
        for c in 0..d1 {
            let rr = if r < i { r } else { n + (r - i) };
            let cc = if c < i { c } else { n + (c - i) };
            out[(rr, cc)] = m1[(r, c)];
        }
    }
    for r in 0..d2 {
        for c in 0..d2 {
            let rr = if r < j { i + r } else { n + i + (r - j) };
            let cc = if c < j { i + c } else { n + i + (c - j) };
            out[(rr, cc)] = m2[(r, c)];
        }
    }
    Ok(out)
}

/// Planar rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`, eigenvalues `e^{±iθ}`.
pub fn rotation(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Hyperbolic normal form `diag(λ, 1/λ)`.
pub fn hyperbolic(lambda: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[lambda, 0.0, 0.0, 1.0 / lambda])
}

/// `N₁(λ, b) = [[λ, b], [0, λ]]` for `λ = ±1`.
pub fn n1(lambda: f64, b: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[lambda, b, 0.0, lambda])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    EE,
    EH,
    HH,
    CS,
    Degenerate,
}

impl StabilityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityClass::EE => "EE",
            StabilityClass::EH => "EH",
            StabilityClass::HH => "HH",
            StabilityClass::CS => "CS",
            StabilityClass::Degenerate => "Degenerate",
        }
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StabilityClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "EE" => Ok(StabilityClass::EE),
            "EH" => Ok(StabilityClass::EH),
            "HH" => Ok(StabilityClass::HH),
            "CS" => Ok(StabilityClass::CS),
            "Degenerate" => Ok(StabilityClass::Degenerate),
            other => Err(Error::invalid(format!("unknown stability class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
}

/// Eigenvalues of a real square matrix via the real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigensolver { matrix: m.clone() })?;
    let ev = schur.complex_eigenvalues();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver { matrix: m.clone() });
    }
    Ok(ev.iter().copied().collect())
}

/// Groups eigenvalues whose pairwise distance is within `cluster_tol`
/// (single linkage) and attaches geometric multiplicities from the
/// singular values of `M − λI`.
pub fn eigen_clusters(m: &DMatrix<f64>, cluster_tol: f64) -> Result<Vec<EigenCluster>> {
    if !(cluster_tol > 0.0) {
        return Err(Error::invalid("cluster tolerance must be positive"));
    }
    let ev = eigenvalues(m)?;
    let n = ev.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if (ev[a] - ev[b]).norm() <= cluster_tol {
                let (ra, rb) = (root(&mut label, a), root(&mut label, b));
                if ra != rb {
                    label[rb.max(ra)] = rb.min(ra);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &z) in ev.iter().enumerate().take(n) {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(z),
            None => groups.push((r, vec![z])),
        }
    }

    let mnorm = m.norm().max(1.0);
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let mut out = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let alg = members.len();
        let value = members.iter().sum::<Complex64>() / alg as f64;
        let mut shifted = mc.clone();
        for i in 0..n {
            shifted[(i, i)] -= value;
        }
        let sv = SVD::try_new(shifted, false, false, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigensolver { matrix: m.clone() })?
            .singular_values;
        let smax = sv.max().max(mnorm);
        let geo = sv.iter().filter(|&&s| s < cluster_tol * smax).count().clamp(1, alg);
        out.push(EigenCluster {
            value,
            algebraic_multiplicity: alg,
            geometric_multiplicity: geo,
        });
    }
    out.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Symplectic defect allowed when classifying. Round-off in `MᵀJM` grows
/// with `‖M‖²`, so the bound is relative for large monodromies.
fn classify_gate(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    let scale = m.amax().max(1.0);
    let defect = symplectic_defect(m)?;
    if defect > 10.0 * tol * scale * scale {
        return Err(Error::invalid(format!(
            "matrix is not symplectic (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Spectral class of a 4x4 symplectic matrix.
pub fn classify_monodromy4(m: &DMatrix<f64>, tol: f64) -> Result<StabilityClass> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::invalid(format!("expected 4x4, got {}x{}", m.nrows(), m.ncols())));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    classify_gate(m, tol)?;
    Ok(classify_spectrum(&eigenvalues(m)?, tol))
}

/// Class of a 4-point symplectic spectrum under the two tolerance bands.
pub fn classify_spectrum(ev: &[Complex64], tol: f64) -> StabilityClass {
    let mut circle_nonreal = 0;
    let mut real_off_circle = 0;
    let mut complex_off = 0;
    for z in ev {
        let on_circle = (z.norm() - 1.0).abs() <= tol;
        let real = z.im.abs() <= tol;
        match (on_circle, real) {
            (true, true) => return StabilityClass::Degenerate,
            (true, false) => circle_nonreal += 1,
            (false, true) => {
                if z.norm() <= tol {
                    return StabilityClass::Degenerate;
                }
                real_off_circle += 1
            }
            (false, false) => complex_off += 1,
        }
    }
    match (circle_nonreal, real_off_circle, complex_off) {
        (4, 0, 0) => StabilityClass::EE,
        (2, 2, 0) => StabilityClass::EH,
        (0, 4, 0) => StabilityClass::HH,
        (0, 0, 4) => StabilityClass::CS,
        _ => StabilityClass::Degenerate,
    }
}

/// Class of a symplectic spectrum of any even size: `EE` when every
/// eigenvalue is on the circle and non-real, `EH` for a mix of those and
/// real off-circle ones, `HH` and `CS` when all are real off-circle or
/// complex off-circle. Anything else, including eigenvalues at ±1, is
/// `Degenerate`. On four points this agrees with [`classify_spectrum`].
pub fn classify_symplectic_spectrum(ev: &[Complex64], tol: f64) -> StabilityClass {
    if ev.len() == 4 {
        return classify_spectrum(ev, tol);
    }
    let (mut circle, mut real, mut complex) = (0, 0, 0);
    for z in ev {
        let on_circle = (z.norm() - 1.0).abs() <= tol;
        let is_real = z.im.abs() <= tol;
        match (on_circle, is_real) {
            (true, true) => return StabilityClass::Degenerate,
            (true, false) => circle += 1,
            (false, true) if z.norm() <= tol => return StabilityClass::Degenerate,
            (false, true) => real += 1,
            (false, false) => complex += 1,
        }
    }
    match (circle, real, complex) {
        (c, 0, 0) if c > 0 => StabilityClass::EE,
        (c, r, 0) if c > 0 && r > 0 => StabilityClass::EH,
        (0, r, 0) if r > 0 => StabilityClass::HH,
        (0, 0, x) if x > 0 => StabilityClass::CS,
        _ => StabilityClass::Degenerate,
    }
}

/// Spectrally stable and semisimple on the unit circle.
pub fn is_linearly_stable(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    check_even_square(m)?;
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    classify_gate(m, tol)?;
    let clusters = eigen_clusters(m, tol)?;
    Ok(clusters.iter().all(|c| {
        (c.value.norm() - 1.0).abs() <= tol && c.geometric_multiplicity == c.algebraic_multiplicity
    }))
}
