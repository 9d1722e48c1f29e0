//! The linearized Kepler problem in true anomaly: `B_Kep(θ)`, the
//! ρ-integrals and the explicit fundamental solution `γ_Kep(θ)`.

use nalgebra::{Matrix4, Vector4};
use num_dual::{Dual64, DualNum};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Orbital eccentricity in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Eccentricity(f64);

impl Eccentricity {
    pub fn new(e: f64) -> Result<Self> {
        if e.is_finite() && (0.0..1.0).contains(&e) {
            Ok(Eccentricity(e))
        } else {
            Err(Error::invalid(format!("eccentricity {e} outside [0, 1)")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub const ZERO: Eccentricity = Eccentricity(0.0);
}

impl TryFrom<f64> for Eccentricity {
    type Error = Error;
    fn try_from(e: f64) -> Result<Self> {
        Eccentricity::new(e)
    }
}

impl From<Eccentricity> for f64 {
    fn from(e: Eccentricity) -> f64 {
        e.0
    }
}

/// `R_Kep = diag(3, 0)`.
pub fn r_kep() -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(3.0, 0.0, 0.0, 0.0)
}

/// `J₄ = [[0, −I], [I, 0]]`.
pub fn j4() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, -1.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0,
    )
}

fn rho0_generic<T: DualNum<Primitive = f64> + Copy>(e: f64, theta: T) -> T {
    let w = 1.0 - e * e;
    let k = ((1.0 - e) / (1.0 + e)).sqrt();
    let half = theta * 0.5;
    // atan2 keeps the arctan branch continuous through θ = π.
    let arc = (half.sin() * k).atan2(half.cos());
    arc * (2.0 / w.powf(1.5)) - theta.sin() * e / ((theta.cos() * e + 1.0) * w)
}

/// `ρ₀(e, θ) = ∫₀^θ (1 + e cos τ)^{−2} dτ`, continuous and increasing in θ.
pub fn rho0(e: Eccentricity, theta: f64) -> f64 {
    let e = e.get();
    let period = 2.0 * PI;
    let turns = (theta / period).floor();
    let rest = theta - turns * period;
    let full = period / (1.0 - e * e).powf(1.5);
    turns * full + rho0_generic(e, rest)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoIntegrals {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
}

/// The triangle integrals over `0 ≤ s ≤ θ ≤ π`, each reduced to
/// `∫₀^π (π − s) g(s) ds`.
pub fn rho_integrals(e: Eccentricity) -> Result<RhoIntegrals> {
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let ev = e.get();
    let rho1 = integrate(|s| (PI - s) / (1.0 + ev * s.cos()).powi(2), 0.0, PI, opts)?.value;
    let rho2 = integrate(|s| (PI - s) / (1.0 + ev * s.cos()), 0.0, PI, opts)?.value;
    let rho3 = integrate(|s| (PI - s) * rho0(e, s), 0.0, PI, opts)?.value;
    Ok(RhoIntegrals { rho1, rho2, rho3 })
}

/// `B(θ)` for a 2x2 constant `R`: blocks `I, −J₂; J₂, I − R/(1 + e cos θ)`.
pub fn b_essential(e: f64, r: &nalgebra::Matrix2<f64>, theta: f64) -> Matrix4<f64> {
    let s = 1.0 / (1.0 + e * theta.cos());
    Matrix4::new(
        1.0, 0.0, 0.0, 1.0, //
        0.0, 1.0, -1.0, 0.0, //
        0.0, -1.0, 1.0 - r[(0, 0)] * s, -r[(0, 1)] * s, //
        1.0, 0.0, -r[(1, 0)] * s, 1.0 - r[(1, 1)] * s,
    )
}

pub fn b_kep(e: Eccentricity, theta: f64) -> Matrix4<f64> {
    b_essential(e.get(), &r_kep(), theta)
}

fn gamma_generic<T: DualNum<Primitive = f64> + Copy>(e: f64, t: T, r: T) -> Matrix4<T> {
    let c = t.cos();
    let s = t.sin();
    let one = T::from(1.0);
    let ep = 1.0 + e;
    let em = 1.0 - e;
    let ec = c * e + 1.0; // 1 + e cos θ
    let s2 = s * s;
    let half_sin = (t * 0.5).sin();

    let a = [
        [
            (-c - s2 * e + 2.0 + e) / ep,
            ((c * e - 1.0) * s * 2.0 - s * (3.0 * e * ep) / ec) / em,
            -(-c * e + 1.0 + ec.recip() * (3.0 * e)) * s / em,
            (one - c - s2 * e) / ep,
        ],
        [
            -ec * s / ep,
            -(-c * 2.0 + s2 * (2.0 * e) + ep) / em,
            -(one - c + s2 * e) / em,
            -ec * s / ep,
        ],
        [
            ec * s / ep,
            (c - 1.0) * (c * e + ep) * (-2.0) / em,
            -(c + c * c * e - 2.0) / em,
            ec * s / ep,
        ],
        [
            (c * e + 2.0 + e) * half_sin * half_sin * (-2.0) / ep,
            (c * e + 2.0) * s * 2.0 / em,
            (c * e + 2.0) * s / em,
            (c * 2.0 + c * c * e - 1.0) / ep,
        ],
    ];
    let q = ec + s2 * (e * e);
    let k = 3.0 / em;
    let corr = [
        [T::from(0.0), q * (k * ep), q * k, T::from(0.0)],
        [T::from(0.0), ec * s * (k * e * ep), ec * s * (k * e), T::from(0.0)],
        [T::from(0.0), -ec * s * (k * e * ep), -ec * s * (k * e), T::from(0.0)],
        [T::from(0.0), -ec * ec * (k * ep), -ec * ec * k, T::from(0.0)],
    ];
    Matrix4::from_fn(|i, j| a[i][j] + r * corr[i][j])
}

/// A point on the Kepler fundamental solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerFrame {
    pub theta: f64,
    pub matrix: Matrix4<f64>,
}

/// `γ_Kep(θ)`: the explicit fundamental solution, base matrix plus
/// `ρ₀(e, θ)` times the correction matrix.
pub fn gamma_kep(e: Eccentricity, theta: f64) -> KeplerFrame {
    KeplerFrame {
        theta,
        matrix: gamma_matrix(e.get(), theta),
    }
}

pub(crate) fn gamma_matrix(e: f64, theta: f64) -> Matrix4<f64> {
    if theta == 0.0 {
        return Matrix4::identity();
    }
    gamma_generic(e, theta, rho0(Eccentricity(e), theta))
}

/// `dγ_Kep/dθ` by forward-mode differentiation of the closed form.
pub fn gamma_kep_derivative(e: Eccentricity, theta: f64) -> Matrix4<f64> {
    let ev = e.get();
    // dρ₀/dθ = (1 + e cos θ)^{-2} exactly.
    let r = Dual64::new(rho0(e, theta), (1.0 + ev * theta.cos()).powi(-2));
    let m = gamma_generic(ev, Dual64::from_re(theta).derivative(), r);
    m.map(|x| x.eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualMethod {
    Analytic,
    CentralDifference,
}

/// `max_θ ‖dγ/dθ − J B_Kep(θ) γ(θ)‖_∞` over `n_samples` points of `[0, 2π]`.
pub fn kepler_residual(e: Eccentricity, n_samples: usize, method: ResidualMethod) -> Result<f64> {
    if n_samples < 16 {
        return Err(Error::invalid("at least 16 samples are required"));
    }
    let j = j4();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..n_samples {
        let theta = 2.0 * PI * i as f64 / (n_samples - 1) as f64;
        let d = match method {
            ResidualMethod::Analytic => gamma_kep_derivative(e, theta),
            ResidualMethod::CentralDifference => {
                let (tp, tm) = (theta + h, theta - h);
                (gamma_matrix(e.get(), tp) - gamma_matrix(e.get(), tm)) / (tp - tm)
            }
        };
        let rhs = j * b_kep(e, theta) * gamma_matrix(e.get(), theta);
        worst = worst.max((d - rhs).amax());
    }
    Ok(worst)
}

/// The four solutions of the linearized Kepler flow built from first
/// integrals, in the original `(p, q)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegralSolutions {
    pub xi_h_energy: Vector4<f64>,
    pub xi_c: Vector4<f64>,
    pub xi_a2: Vector4<f64>,
    pub xi_scaling: Vector4<f64>,
}

pub fn first_integral_solutions(e: Eccentricity, theta: f64) -> FirstIntegralSolutions {
    let ev = e.get();
    let (s, c) = theta.sin_cos();
    let ec = 1.0 + ev * c;
    let xi_h = Vector4::new(-c * ec * ec, -s * ec * ec, -s, ev + c);
    let xi_c = Vector4::new(-ev - c, -s, -s / ec, c / ec);
    let xi_a2 = Vector4::new(
        (2.0 * theta).sin() + ev * s * (1.0 + c * c),
        -(2.0 * theta).cos() - ev * c * c * c,
        (ec + s * s) / ec,
        -s * c / ec,
    );
    // Time along the orbit with C = 1 is ρ₀(e, θ).
    let t = rho0(e, theta);
    let xi_scaling = Vector4::new(-s / 3.0, (ev + c) / 3.0, -2.0 * c / (3.0 * ec), -2.0 * s / (3.0 * ec))
        + xi_h * t;
    FirstIntegralSolutions {
        xi_h_energy: xi_h,
        xi_c,
        xi_a2,
        xi_scaling,
    }
}

/// The Kepler orbit `z_K(θ) = (p, q)` with `C = 1`.
pub fn kepler_orbit(e: Eccentricity, theta: f64) -> Vector4<f64> {
    let ev = e.get();
    let (s, c) = theta.sin_cos();
    let r = 1.0 / (1.0 + ev * c);
    Vector4::new(-s, ev + c, r * c, r * s)
}

/// `D²H_K` along the orbit, for `H = |p|²/2 − 1/|q|`.
pub fn kepler_hessian(e: Eccentricity, theta: f64) -> Matrix4<f64> {
    let z = kepler_orbit(e, theta);
    let (q1, q2) = (z[2], z[3]);
    let n2 = q1 * q1 + q2 * q2;
    let n5 = n2 * n2 * n2.sqrt();
    let mut h = Matrix4::identity();
    h[(2, 2)] = (n2 - 3.0 * q1 * q1) / n5;
    h[(2, 3)] = -3.0 * q1 * q2 / n5;
    h[(3, 2)] = h[(2, 3)];
    h[(3, 3)] = (n2 - 3.0 * q2 * q2) / n5;
    h
}
