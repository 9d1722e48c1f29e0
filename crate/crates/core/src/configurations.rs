//! Essential systems of the Lagrange, Euler, (α,η)-type and regular
//! (1+n)-gon families, with the gon constants and (α,η)-envelopes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kepler_core::Eccentricity;
use crate::ode_engine::EssentialSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilySpec {
    Kepler,
    Lagrange { beta: f64 },
    Euler { beta: f64 },
    AlphaEta { alpha: f64, eta: f64 },
    /// A single block `R_l` of the (1+n)-gon.
    GonBlock { n: usize, m: f64, l: usize },
    /// All blocks `R_1, …, R_⌊n/2⌋` of the (1+n)-gon.
    Gon { n: usize, m: f64 },
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(v))
}

impl FamilySpec {
    pub fn lagrange(beta: f64) -> Result<Self> {
        FamilySpec::Lagrange { beta }.validated()
    }

    pub fn euler(beta: f64) -> Result<Self> {
        FamilySpec::Euler { beta }.validated()
    }

    pub fn alpha_eta(alpha: f64, eta: f64) -> Result<Self> {
        FamilySpec::AlphaEta { alpha, eta }.validated()
    }

    pub fn gon_block(n: usize, m: f64, l: usize) -> Result<Self> {
        FamilySpec::GonBlock { n, m, l }.validated()
    }

    pub fn gon(n: usize, m: f64) -> Result<Self> {
        FamilySpec::Gon { n, m }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let in_range = |x: f64, lo: f64, hi: f64| x.is_finite() && x >= lo && x <= hi;
        match self {
            FamilySpec::Kepler => {}
            FamilySpec::Lagrange { beta } if !in_range(beta, 0.0, 9.0) => {
                return Err(Error::invalid(format!("Lagrange beta {beta} outside [0, 9]")))
            }
            FamilySpec::Euler { beta } if !in_range(beta, 0.0, 7.0) => {
                return Err(Error::invalid(format!("Euler beta {beta} outside [0, 7]")))
            }
            FamilySpec::AlphaEta { alpha, eta } => {
                if !in_range(alpha, 1.0, f64::MAX) || !in_range(eta, 0.0, f64::MAX) {
                    return Err(Error::invalid(format!("(alpha, eta) = ({alpha}, {eta}) needs alpha >= 1, eta >= 0")));
                }
            }
            FamilySpec::GonBlock { n, m, l } => {
                check_gon(n, m)?;
                if l == 0 || l > n / 2 {
                    return Err(Error::invalid(format!("gon block l = {l} outside [1, {}]", n / 2)));
                }
            }
            FamilySpec::Gon { n, m } => check_gon(n, m)?,
            _ => {}
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Kepler => "kepler",
            FamilySpec::Lagrange { .. } => "lagrange",
            FamilySpec::Euler { .. } => "euler",
            FamilySpec::AlphaEta { .. } => "alphaeta",
            FamilySpec::GonBlock { .. } => "gonblock",
            FamilySpec::Gon { .. } => "gon",
        }
    }

    /// The scan parameter: β for Lagrange/Euler, ζ(α,η) for the (α,η)
    /// system, `1/m` for the gon.
    pub fn param(&self) -> f64 {
        match *self {
            FamilySpec::Kepler => 0.0,
            FamilySpec::Lagrange { beta } | FamilySpec::Euler { beta } => beta,
            FamilySpec::AlphaEta { alpha, eta } => zeta(alpha, eta),
            FamilySpec::GonBlock { m, .. } | FamilySpec::Gon { m, .. } => 1.0 / m,
        }
    }

    pub fn system(&self, e: Eccentricity) -> Result<EssentialSystem> {
        EssentialSystem::new(e, essential_r(self)?, self.name())
    }
}

fn check_gon(n: usize, m: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::invalid(format!("gon needs n >= 3, got {n}")));
    }
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("central mass m = {m} must be positive")));
    }
    Ok(())
}

/// Constant matrices `R` of the essential blocks.
pub fn essential_r(spec: &FamilySpec) -> Result<Vec<DMatrix<f64>>> {
    let spec = spec.validated()?;
    Ok(match spec {
        FamilySpec::Kepler => vec![diag(&[3.0, 0.0])],
        FamilySpec::Lagrange { beta } => {
            let s = (9.0 - beta).sqrt();
            vec![diag(&[(3.0 + s) / 2.0, (3.0 - s) / 2.0])]
        }
        FamilySpec::Euler { beta } => vec![diag(&[2.0 * beta + 3.0, -beta])],
        FamilySpec::AlphaEta { alpha, eta } => vec![r_alpha_eta(alpha, eta)],
        FamilySpec::GonBlock { n, m, l } => vec![GonData::new(n, m)?.blocks[l - 1].r.clone()],
        FamilySpec::Gon { n, m } => GonData::new(n, m)?.blocks.into_iter().map(|b| b.r).collect(),
    })
}

/// `R_{α,η} = αI + ηÑ`, `Ñ = diag(1, −1)`.
pub fn r_alpha_eta(alpha: f64, eta: f64) -> DMatrix<f64> {
    diag(&[alpha + eta, alpha - eta])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GonBlockData {
    pub l: usize,
    pub p: f64,
    pub s: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub u: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GonData {
    pub n: usize,
    pub m: f64,
    pub sigma_n: f64,
    pub mu: f64,
    /// Blocks `l = 1, …, ⌊n/2⌋`.
    pub blocks: Vec<GonBlockData>,
}

/// `(P_l, S_l, Q_l)` on the unit-circumradius polygon.
pub fn gon_sums(n: usize, l: usize) -> (f64, f64, f64) {
    let (mut p, mut s, mut q) = (0.0, 0.0, 0.0);
    for j in 1..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        let thl = th * l as f64;
        let d3 = 2.0 * (2.0 * (PI * j as f64 / n as f64).sin()).powi(3);
        p += (1.0 - thl.cos() * th.cos()) / d3;
        s += thl.sin() * th.sin() / d3;
        q += (th.cos() - thl.cos()) / d3;
    }
    (p, s, q)
}

pub fn sigma(n: usize) -> f64 {
    0.5 * (1..n).map(|i| 1.0 / (PI * i as f64 / n as f64).sin()).sum::<f64>()
}

/// `Q_max(n) = max_{2 ≤ l ≤ ⌊n/2⌋} Q_l`.
pub fn q_max(n: usize) -> f64 {
    (2..=n / 2).map(|l| gon_sums(n, l).2).fold(f64::NEG_INFINITY, f64::max)
}

impl GonData {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        check_gon(n, m)?;
        let sigma_n = sigma(n);
        let mu = sigma_n / 2.0 + m;
        let mut blocks = Vec::new();
        for l in 1..=n / 2 {
            let (p, s, q) = gon_sums(n, l);
            let a = p - 3.0 * q + 2.0 * m;
            let b = p + 3.0 * q - m;
            let u = if l == 1 {
                let x = (n as f64 + m) / 2.0;
                let c = 1.5 * (m * (m + n as f64)).sqrt();
                let y = m / 2.0 + 2.0 * p;
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[x, 0.0, c, 0.0, 0.0, x, 0.0, -c, c, 0.0, y, 0.0, 0.0, -c, 0.0, y],
                )
            } else if 2 * l == n {
                diag(&[a, b])
            } else {
                DMatrix::from_row_slice(
                    4,
                    4,
                    &[a, 0.0, 0.0, s, 0.0, b, -s, 0.0, 0.0, -s, a, 0.0, s, 0.0, 0.0, b],
                )
            };
            let k = u.nrows();
            let r = DMatrix::identity(k, k) + &u / mu;
            blocks.push(GonBlockData { l, p, s, q, a, b, u, r });
        }
        Ok(GonData { n, m, sigma_n, mu, blocks })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRecord {
    pub l: usize,
    /// +1 or −1.
    pub sign: i8,
    pub alpha_check: f64,
    pub alpha_hat: f64,
    pub eta_check: f64,
    pub eta_hat: f64,
    /// True for `l = n/2`, where the pair is exact.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEtaEnvelope {
    pub n: usize,
    pub m: f64,
    pub records: Vec<EnvelopeRecord>,
}

impl AlphaEtaEnvelope {
    /// Every `(α, η)` pair that enters `ST_n`.
    pub fn corners(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for r in &self.records {
            out.push((r.alpha_check, r.eta_check));
            if !r.exact {
                out.push((r.alpha_hat, r.eta_hat));
            }
        }
        out
    }

    pub fn record(&self, l: usize, sign: i8) -> Option<&EnvelopeRecord> {
        self.records.iter().find(|r| r.l == l && r.sign == sign)
    }
}

pub fn alpha_eta_envelope(n: usize, m: f64) -> Result<AlphaEtaEnvelope> {
    let g = GonData::new(n, m)?;
    let mu = g.mu;
    let mut records = Vec::new();
    for blk in &g.blocks {
        let l = blk.l;
        for sign in [1i8, -1] {
            let rec = if l == 1 {
                let two_p1 = 2.0 * blk.p;
                let half_n = n as f64 / 2.0;
                let eta = f64::from(sign) * 3.0 * (m * (m + n as f64)).sqrt() / (2.0 * mu);
                EnvelopeRecord {
                    l,
                    sign,
                    alpha_check: 1.0 + (two_p1.min(half_n) + m / 2.0) / mu,
                    alpha_hat: 1.0 + (two_p1.max(half_n) + m / 2.0) / mu,
                    eta_check: eta,
                    eta_hat: eta,
                    exact: false,
                }
            } else if 2 * l == n {
                let alpha = 1.0 + (blk.a + blk.b) / (2.0 * mu);
                let eta = (blk.a - blk.b) / (2.0 * mu);
                EnvelopeRecord { l, sign, alpha_check: alpha, alpha_hat: alpha, eta_check: eta, eta_hat: eta, exact: true }
            } else {
                let eta = (blk.a - blk.b) / (2.0 * mu);
                EnvelopeRecord {
                    l,
                    sign,
                    alpha_check: 1.0 + (blk.a + blk.b - 2.0 * blk.s) / (2.0 * mu),
                    alpha_hat: 1.0 + (blk.a + blk.b + 2.0 * blk.s) / (2.0 * mu),
                    eta_check: eta,
                    eta_hat: eta,
                    exact: false,
                }
            };
            records.push(rec);
        }
    }
    Ok(AlphaEtaEnvelope { n, m, records })
}

/// Lower and upper comparison matrices for `R_l`, written in the
/// coordinates of `R_l`. Their spectra are those of
/// `R_{α̌₊,η̌₊} ⊕ R_{α̌₋,η̌₋}` and `R_{α̂₊,η̂₊} ⊕ R_{α̂₋,η̂₋}`.
pub fn envelope_matrices(n: usize, m: f64, l: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let g = GonData::new(n, m)?;
    let env = alpha_eta_envelope(n, m)?;
    let blk = g
        .blocks
        .get(l.wrapping_sub(1))
        .ok_or_else(|| Error::invalid(format!("no gon block l = {l}")))?;
    let rec = env.record(l, 1).expect("every block has a + record");
    if rec.exact {
        return Ok((blk.r.clone(), blk.r.clone()));
    }
    if l == 1 {
        // Same off-diagonal coupling as R_1, constant diagonal.
        let with_diag = |alpha: f64| {
            let mut c = blk.r.clone();
            for i in 0..4 {
                c[(i, i)] = alpha;
            }
            c
        };
        return Ok((with_diag(rec.alpha_check), with_diag(rec.alpha_hat)));
    }
    let d = |alpha: f64, eta: f64| diag(&[alpha + eta, alpha - eta, alpha + eta, alpha - eta]);
    Ok((d(rec.alpha_check, rec.eta_check), d(rec.alpha_hat, rec.eta_hat)))
}

/// `ζ(α, η) = max{|3 − (α + η)|, |η − α|}`.
pub fn zeta(alpha: f64, eta: f64) -> f64 {
    (3.0 - (alpha + eta)).abs().max((eta - alpha).abs())
}

/// How `Ξ(m)` is reduced from the envelope corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiRule {
    /// Maximum of ζ over every corner, with η taken as |η|: `R_{α,−η}`
    /// is a rotation of `R_{α,η}` that commutes with 𝕁.
    #[default]
    AllCorners,
    /// `α̂₊(m,n,1) + η̂₊(m,n,1) − 3`.
    PrintedReduction,
}

pub fn xi_gon(n: usize, m: f64) -> Result<f64> {
    xi_gon_with(n, m, XiRule::AllCorners)
}

pub fn xi_gon_with(n: usize, m: f64, rule: XiRule) -> Result<f64> {
    let env = alpha_eta_envelope(n, m)?;
    Ok(match rule {
        XiRule::AllCorners => env
            .corners()
            .into_iter()
            .map(|(a, e)| zeta(a, e.abs()))
            .fold(0.0, f64::max),
        XiRule::PrintedReduction => {
            let r = env.record(1, 1).expect("l = 1 record");
            r.alpha_hat + r.eta_hat - 3.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_examples() {
        assert_eq!(essential_r(&FamilySpec::lagrange(0.0).unwrap()).unwrap()[0], diag(&[3.0, 0.0]));
        assert_eq!(essential_r(&FamilySpec::lagrange(9.0).unwrap()).unwrap()[0], diag(&[1.5, 1.5]));
        assert_eq!(essential_r(&FamilySpec::euler(7.0).unwrap()).unwrap()[0], diag(&[17.0, -7.0]));
        assert_eq!(essential_r(&FamilySpec::alpha_eta(1.5, 1.5).unwrap()).unwrap()[0], diag(&[3.0, 0.0]));
        assert!(FamilySpec::lagrange(9.5).is_err());
        assert!(FamilySpec::euler(-0.1).is_err());
        assert!(FamilySpec::alpha_eta(0.5, 0.0).is_err());
        assert!(FamilySpec::gon_block(9, 10.0, 5).is_err());
        assert!(FamilySpec::gon(2, 10.0).is_err());
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(1.5, 1.5), 0.0);
        assert_eq!(zeta(1.0, 0.0), 2.0);
        assert_eq!(zeta(2.0, 2.0), 1.0);
    }

    #[test]
    fn sigma_and_qmax() {
        assert!((sigma(3) - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((q_max(9) - 4.9047).abs() < 1e-4);
        let s = PI / 18.0;
        let expected = (1.0 / s.sin()).powi(3) * (1.0 / s.cos()).powi(6) * (1.0 / (PI / 9.0).cos()).powi(3)
            * (6.0 * 3f64.sqrt() + 5.0 * (PI / 9.0).sin() + 14.0 * (2.0 * PI / 9.0).sin() + 19.0 * s.cos())
            / 2048.0;
        assert!((q_max(9) - expected).abs() < 1e-12);
    }

    #[test]
    fn gon_shapes() {
        let g = GonData::new(8, 3.0).unwrap();
        let dims: Vec<usize> = g.blocks.iter().map(|b| b.r.nrows()).collect();
        assert_eq!(dims, vec![4, 4, 4, 2]);
        let g = GonData::new(9, 3.0).unwrap();
        assert_eq!(g.blocks.len(), 4);
        for n in 3..=12 {
            for b in GonData::new(n, 2.5).unwrap().blocks {
                assert_eq!(b.u, b.u.transpose());
            }
        }
    }

    #[test]
    fn n9_envelope_reference() {
        let c = 6.0 * 1.0 + 2.0 * 3f64.sqrt() + 3.0 / (PI / 9.0).sin() + 3.0 / (2.0 * PI / 9.0).sin() + 3.0 / (PI / 18.0).cos();
        for m in [1.0, 10.0, 100.0] {
            let den = c + 6.0 * (m - 1.0);
            let env = alpha_eta_envelope(9, m).unwrap();
            let r = env.record(1, 1).unwrap();
            assert!((r.alpha_hat - (1.0 + 3.0 * (m + 9.0) / den)).abs() < 1e-12);
            assert!((r.eta_hat - 9.0 * (m * (m + 9.0)).sqrt() / den).abs() < 1e-12);
            assert_eq!(env.record(1, -1).unwrap().eta_check, -r.eta_check);
        }
    }

    #[test]
    fn even_n_exact_pair() {
        let env = alpha_eta_envelope(10, 7.0).unwrap();
        let r = env.record(5, 1).unwrap();
        assert!(r.exact);
        assert_eq!(r.alpha_check, r.alpha_hat);
    }

    #[test]
    fn xi_printed_reduction_for_large_m() {
        let m = 50.0;
        let env = alpha_eta_envelope(9, m).unwrap();
        let r = env.record(1, 1).unwrap();
        let expected = xi_gon_with(9, m, XiRule::PrintedReduction).unwrap();
        assert!((expected - zeta(r.alpha_hat, r.eta_hat)).abs() < 1e-12);
        assert!(xi_gon_with(9, 1e8, XiRule::PrintedReduction).unwrap() < 1e-3);
        assert!(xi_gon(9, 1e8).unwrap() < 1e-3);
    }

    #[test]
    fn envelope_psd_ordering() {
        let min_eig = |m: DMatrix<f64>| m.symmetric_eigenvalues().min();
        for n in 3..=12 {
            for m in [1.0, 10.0, 100.0] {
                let g = GonData::new(n, m).unwrap();
                for blk in &g.blocks {
                    let (lo, hi) = envelope_matrices(n, m, blk.l).unwrap();
                    let a = min_eig(&blk.r - &lo);
                    let b = min_eig(&hi - &blk.r);
                    assert!(a > -1e-12 && b > -1e-12, "n={n} m={m} l={}: {a} {b}", blk.l);
                }
                for r in alpha_eta_envelope(n, m).unwrap().records {
                    assert!(r.alpha_check <= r.alpha_hat);
                }
            }
        }
    }
}
