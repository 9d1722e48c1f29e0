//! The explicit bound formulas. Coefficients carry 1/e² and 1/e⁴ factors
//! whose singular parts cancel, so below `TAYLOR_SWITCH` the regular
//! bounds are evaluated from their Taylor polynomials at e = 0.

use std::f64::consts::PI;

use super::taylor;
use crate::error::{Error, Result};
use crate::kepler_core::{rho0, rho_integrals, Eccentricity};
use crate::quadrature::{integrate, QuadOptions};

/// Below this eccentricity the Taylor polynomials replace direct evaluation.
pub const TAYLOR_SWITCH: f64 = 0.05;

const PI2: f64 = PI * PI;
const PI3: f64 = PI2 * PI;
const PI4: f64 = PI2 * PI2;

fn residual_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

fn horner(c: &[f64], e: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * e + x)
}

fn big_l(e: f64) -> f64 {
    ((1.0 + e) / (1.0 - e)).ln()
}

fn a0p(e: f64) -> f64 {
    let e2 = e * e;
    let poly = -382.0 * e.powi(7) - 54.0 * PI2 * e.powi(6) + 532.0 * e.powi(5) + 90.0 * PI2 * e.powi(4)
        + 120.0 * e.powi(3)
        - 54.0 * PI2 * e2
        + 18.0 * PI2;
    let root = 18.0 * PI2 * (e - 1.0).powi(3) * (e + 1.0).powi(2) * (e2 + 1.0) * ((1.0 + e) / (1.0 - e)).sqrt();
    let log = (45.0 * e.powi(8) + 249.0 * e.powi(6) - 300.0 * e.powi(4) + 6.0 * e2) * big_l(e);
    (poly + root - log) / (36.0 * e.powi(4) * (e2 - 1.0).powi(3))
}

fn a0m(e: f64) -> f64 {
    let e2 = e * e;
    let s = (1.0 - e2).sqrt();
    let p = |k: i32| e.powi(k);
    let b = -382.0 * p(11) + 72.0 * PI2 * p(10) + 1296.0 * p(9) + 81.0 * PI4 * p(8) - 36.0 * PI2 * p(8)
        - 1326.0 * p(7)
        + 162.0 * PI4 * p(6)
        + 558.0 * PI2 * p(6)
        + 292.0 * p(5)
        + 81.0 * PI4 * p(4)
        - 666.0 * PI2 * p(4)
        + 120.0 * p(3)
        + 90.0 * PI2 * e2
        + 216.0 * PI2 * (p(4) - 1.0) * s * p(4) * (e + 1.0).ln()
        + PI2 * (216.0 * p(4) - 216.0 * p(8)) * s * (s / 2.0 + 0.5).ln()
        - 3.0
            * (e2 - 1.0)
            * (15.0 * p(8) + 68.0 * p(6) + 6.0 * (12.0 * PI2 * s + 17.0) * e2 + 3.0 * (24.0 * PI2 * s - 61.0) * p(4)
                - 2.0)
            * e2
            * big_l(e)
        + PI2
            * (126.0 * p(10) - 108.0 * p(9) - 180.0 * p(8) + 648.0 * p(7) + 486.0 * p(6) + 756.0 * p(5)
                + 954.0 * p(4)
                - 108.0 * e2
                + 18.0)
            * s
        - 18.0 * PI2;
    b / (36.0 * p(4) * (1.0 - e2).powi(5))
}

fn a1p(e: f64) -> f64 {
    (16.0 - e.powi(4)) / (4.0 * (1.0 - e * e).powi(2))
}

fn a2p(e: f64) -> f64 {
    let e2 = e * e;
    (7.0 * e2 * e2 + 12.0 * e2 - 3.0) / (2.0 * e2 * (1.0 - e2).powi(2))
}

fn a3m(e: f64) -> f64 {
    9.0 * PI * (e * e + 1.0).powi(2) / (1.0 - e * e).powf(3.5)
}

fn a1m(e: f64) -> f64 {
    let e2 = e * e;
    let s = (1.0 - e2).sqrt();
    (e.powi(8) - 2.0 * e.powi(6) - 8.0 * (9.0 * PI2 * s - 4.0) * e2 - 4.0 * (9.0 * PI2 * s + 4.0)
        - 3.0 * (12.0 * PI2 * s + 5.0) * e2 * e2)
        / (4.0 * (1.0 - e2).powi(4))
}

fn hp_s(e: f64, s: f64) -> f64 {
    e.powi(3) * (3.0 * s).cos() + 4.0 * e * e * (2.0 * s).cos() + (e * e + 6.0) * e * s.cos() + 2.0 * e * e + 2.0
}

#[cfg(test)]
fn hp_t(e: f64, t: f64) -> f64 {
    (e * t.cos() + 1.0) * (e * e * (2.0 * t).cos() + 2.0 * e * t.cos() + 1.0)
}

/// `∫_s^π hp_t(t) dt`, from the expansion
/// `hp_t = (1 − e²) + e(3 − e²)cos t + 4e²cos²t + 2e³cos³t`.
fn hp_t_tail(e: f64, s: f64) -> f64 {
    let e2 = e * e;
    let (sn, cs) = s.sin_cos();
    let anti = (1.0 - e2) * s + e * (3.0 - e2) * sn + 4.0 * e2 * (s / 2.0 + sn * cs / 2.0)
        + 2.0 * e2 * e * (sn - sn.powi(3) / 3.0);
    PI * (1.0 + e2) - anti
}

fn hm(e: f64, t: f64) -> f64 {
    let e2 = e * e;
    3.0 * hp_s(e, t)
        * (3.0 * (e2 + 1.0) * t + e * t.sin() * (e2 * (2.0 * t).cos() + 2.0 * e2 + 6.0 * e * t.cos() + 9.0))
        / (4.0 * (e2 - 1.0).powi(2))
}

fn ta0(e: f64) -> f64 {
    let e2 = e * e;
    let s = (1.0 - e2).sqrt();
    let p = |k: i32| e.powi(k);
    let b = 140.0 * p(11) + 29.0 * PI2 * p(10) + 6.0 * p(9) + 36.0 * PI4 * p(8) + 17.0 * PI2 * p(8)
        - 408.0 * p(7)
        + 36.0 * PI4 * p(6)
        + 47.0 * PI2 * p(6)
        + 238.0 * p(5)
        + 9.0 * PI4 * p(4)
        - 101.0 * PI2 * p(4)
        + 24.0 * p(3)
        + 10.0 * PI2 * e2
        - 2.0 * PI2
        - 36.0 * PI2 * s * (-2.0 * p(4) + e2 + 1.0) * p(4) * (e + 1.0).ln()
        + PI2 * (-72.0 * p(8) + 36.0 * p(6) + 36.0 * p(4)) * s * (s / 2.0 + 0.5).ln()
        + (e2 - 1.0)
            * (6.0 * p(8) - 47.0 * p(6) - 3.0 * (12.0 * PI2 * s + 13.0) * e2 + (78.0 - 72.0 * PI2 * s) * p(4) + 2.0)
            * e2
            * big_l(e)
        + PI2
            * (-26.0 * p(10) + 72.0 * p(9) + 20.0 * p(8) + 180.0 * p(7) + 172.0 * p(6) + 72.0 * p(5)
                + 170.0 * p(4)
                - 14.0 * e2
                + 2.0)
            * s;
    b / (p(4) * (1.0 - e2).powi(5))
}

fn ta1(e: f64) -> f64 {
    let e2 = e * e;
    -3.0 * (4.0 * e2 * e2 + 43.0 * e2 + 28.0) / (1.0 - e2).powi(2)
        - 36.0 * (2.0 * PI * e2 + PI).powi(2) / (1.0 - e2).powf(3.5)
}

fn ta2(e: f64) -> f64 {
    let e2 = e * e;
    2.0 * (18.0 * e2 * e2 + e2 + 5.0) / (e2 * (1.0 - e2).powi(2))
}

fn ta3(e: f64) -> f64 {
    36.0 * PI * (2.0 * e * e + 1.0).powi(2) / (1.0 - e * e).powf(3.5)
}

fn th(e: f64, t: f64) -> f64 {
    let c = t.cos();
    18.0 * (e * c + 1.0) * (e * e + 2.0 * e * c + 1.0) * (2.0 * e * e * t + e * t.sin() * (e * e + e * c + 3.0) + t)
        / (1.0 - e * e).powi(2)
}

fn rho0_sq(e: Eccentricity, t: f64) -> f64 {
    rho0(e, t).powi(2)
}

fn f_l_plus_direct(e: Eccentricity) -> Result<f64> {
    let ev = e.get();
    let rho = rho_integrals(e)?;
    let tail = integrate(|s| hp_s(ev, s) * rho0_sq(e, s) * hp_t_tail(ev, s), 0.0, PI, residual_opts())?.value;
    Ok(a0p(ev) + a1p(ev) * rho.rho1 + a2p(ev) * rho.rho2 + tail * 9.0 / (4.0 * (ev * ev - 1.0).powi(2)))
}

fn f_l_minus_direct(e: Eccentricity) -> Result<f64> {
    let ev = e.get();
    let rho = rho_integrals(e)?;
    let tail = integrate(|t| hm(ev, t) * rho0_sq(e, t), 0.0, PI, residual_opts())?.value;
    Ok(a0m(ev) + a1m(ev) * rho.rho1 - a2p(ev) * rho.rho2 + a3m(ev) * rho.rho3 + tail)
}

fn f_tilde_direct(e: Eccentricity) -> Result<f64> {
    let ev = e.get();
    let rho = rho_integrals(e)?;
    let tail = integrate(|t| th(ev, t) * rho0_sq(e, t), 0.0, PI, residual_opts())?.value;
    Ok(ta0(ev) + ta1(ev) * rho.rho1 + ta2(ev) * rho.rho2 + ta3(ev) * rho.rho3 + tail)
}

/// `f_{L,+}(e)`: the trace of F² on the + half for `D_L`.
pub fn f_l_plus(e: Eccentricity) -> Result<f64> {
    if e.get() < TAYLOR_SWITCH {
        return Ok(horner(&taylor::F_L_PLUS, e.get()));
    }
    f_l_plus_direct(e)
}

/// `f_{L,−}(e)`.
pub fn f_l_minus(e: Eccentricity) -> Result<f64> {
    if e.get() < TAYLOR_SWITCH {
        return Ok(horner(&taylor::F_L_MINUS, e.get()));
    }
    f_l_minus_direct(e)
}

/// `f̃(e)` for `D̃`.
pub fn f_tilde(e: Eccentricity) -> Result<f64> {
    if e.get() < TAYLOR_SWITCH {
        return Ok(horner(&taylor::F_TILDE, e.get()));
    }
    f_tilde_direct(e)
}

fn g_l_plus_direct(e: f64) -> f64 {
    let e2 = e * e;
    let p = |k: i32| e.powi(k);
    let t1 = (5.0 * p(4) + 3.0) * (4.0 * e - PI2) / (4.0 * e2 * (e2 - 1.0).powi(2));
    let t2 = -6.0 * PI2 * (e2 + 1.0) * (e + (1.0 - e).ln()) / ((e - 1.0).powi(2) * e2 * (e + 1.0).powi(3));
    let t3 = -PI2 * (p(4) - 16.0) / (8.0 * (1.0 - e2).powf(3.5));
    let t4 = 3.0 * (15.0 * p(6) + 83.0 * p(4) - 100.0 * e2 + 2.0) * e2 * ((1.0 - e) / (1.0 + e)).ln()
        / (36.0 * p(4) * (e2 - 1.0).powi(3));
    let t5 = (27.0 * (3.0 * PI2 - 16.0) * p(6) + (-112.0 + 441.0 * PI2 - 18.0 * PI4) * p(5)
        - 27.0 * (48.0 + 3.0 * PI2 + 4.0 * PI4) * p(4)
        + (7536.0 + 972.0 * PI2 - 9.0 * PI4) * p(3)
        - 90.0 * PI2 * (6.0 + PI2) * e2
        + 5184.0 * e
        - 18.0 * PI4)
        / (48.0 * (e2 - 1.0).powi(5));
    let t6 = (-191.0 * p(7) - 27.0 * PI2 * p(6) + 266.0 * p(5) + 45.0 * PI2 * p(4) + 60.0 * p(3) - 27.0 * PI2 * e2
        + 9.0 * PI2 * (e - 1.0).powi(3) * (e + 1.0).powi(2) * (e2 + 1.0) * ((1.0 + e) / (1.0 - e)).sqrt()
        + 9.0 * PI2)
        / (18.0 * p(4) * (e2 - 1.0).powi(3));
    t1 + t2 + t3 + t4 + t5 + t6
}

fn g_l_minus_check_direct(e: f64) -> f64 {
    let e2 = e * e;
    let s = (1.0 - e2).sqrt();
    let r = ((1.0 + e) / (1.0 - e)).sqrt();
    let p = |k: i32| e.powi(k);
    let ln1m = (1.0 - e).ln();
    let b = -45.0 * PI2 * p(14) + 360.0 * p(13) + 45.0 * PI2 * p(12) + 225.0 * PI2 * p(11) - 1844.0 * p(11)
        + 27.0 * PI2 * p(10)
        - 225.0 * PI2 * p(9)
        + 3888.0 * p(9)
        + 162.0 * PI4 * p(8)
        - 324.0 * PI3 * p(8)
        - 45.0 * PI2 * p(8)
        - 162.0 * PI4 * p(7)
        - 648.0 * PI3 * p(7)
        - 360.0 * PI2 * p(7)
        - 3660.0 * p(7)
        - 486.0 * PI4 * p(6)
        + 1647.0 * PI2 * p(6)
        - 324.0 * PI4 * p(5)
        + 2592.0 * PI3 * p(5)
        + 360.0 * PI2 * p(5)
        + 1232.0 * p(5)
        + 810.0 * PI4 * p(4)
        + 4212.0 * PI3 * p(4)
        - 1827.0 * PI2 * p(4)
        + 810.0 * PI4 * p(3)
        + 1944.0 * PI3 * p(3)
        + 24.0 * p(3)
        + 1458.0 * PI4 * e2
        + 234.0 * PI2 * e2
        + 972.0 * PI4 * e
        - 36.0 * PI2
        + 216.0 * PI * (e2 + 1.0) * ((2.0 * PI - 3.0) * e2 - 2.0 * PI - 3.0) * s * p(4) * (e + 1.0).ln()
        + (216.0 * p(8) + 1296.0 * p(6) + 1080.0 * p(4)) * (PI2 * s * big_l(e) + PI2 * s * (s / 2.0 + 0.5).ln())
        - 324.0
            * PI3
            * (e - 1.0)
            * (2.0 * p(6) + 8.0 * p(5) + 3.0 * PI * p(4) + 16.0 * p(4) + 6.0 * PI * p(3) + 16.0 * p(3)
                + 6.0 * PI * e2
                + 6.0 * e2
                + 6.0 * PI * e
                + 3.0 * PI)
            * ln1m
        - 648.0 * PI3 * (e - 1.0) * PI * (e2 + 1.0).powi(2) * r * e * ln1m
        + (-108.0 * p(12) - 282.0 * p(10) + 1776.0 * p(8) - 2286.0 * p(6) + 912.0 * p(4) - 12.0 * e2) * big_l(e)
        + PI4 * (-324.0 * p(8) - 324.0 * p(7) - 648.0 * p(5) + 972.0 * p(4) - 324.0 * p(3) + 648.0 * e2) * r
        + PI2
            * (252.0 * p(10) - 216.0 * p(9) - 360.0 * p(8) + 1296.0 * p(7) + 972.0 * p(6) + 1512.0 * p(5)
                + 1908.0 * p(4)
                - 216.0 * e2
                + 36.0)
            * s;
    b / (72.0 * p(4) * (1.0 - e2).powi(5))
}

fn g_tilde_check_direct(e: f64) -> f64 {
    let e2 = e * e;
    let s = (1.0 - e2).sqrt();
    let q = ((1.0 - e) / (e + 1.0)).sqrt();
    let p = |k: i32| e.powi(k);
    let ln1m = (1.0 - e).ln();
    let ln1p = (1.0 + e).ln();
    let rooted = s
        * (-PI2 * (-72.0 * p(8) + 36.0 * p(6) + 36.0 * p(4)) * ln1m
            - PI * (144.0 * p(8) + 144.0 * p(6) + 36.0 * p(4)) * ln1p
            + PI2 * (72.0 * p(8) + 180.0 * p(6) + 72.0 * p(4)) * (s / 2.0 + 0.5).ln()
            + PI2
                * (-26.0 * p(10) + 72.0 * p(9) + 20.0 * p(8) + 180.0 * p(7) + 172.0 * p(6) + 72.0 * p(5)
                    + 170.0 * p(4)
                    - 14.0 * e2
                    + 2.0));
    let b = rooted - 9.0 * PI2 * p(14) + 72.0 * p(13) + 17.0 * PI2 * p(12) / 2.0 - 72.0 * p(11)
        + 99.0 * PI2 * p(10) / 2.0
        - 72.0 * PI2 * p(9)
        + 534.0 * p(9)
        + 54.0 * PI4 * p(8)
        - 273.0 * PI2 * p(8) / 8.0
        - 252.0 * PI2 * p(7)
        + 528.0 * p(7)
        + 54.0 * PI4 * p(6)
        + 77.0 * PI2 * p(6) / 2.0
        - 108.0 * PI2 * p(5)
        + 726.0 * p(5)
        + 27.0 * PI4 * p(4) / 2.0
        - 225.0 * PI2 * p(4) / 2.0
        + 4.0 * p(3)
        + 15.0 * PI2 * e2
        + (e2 - 1.0).powi(3) * (6.0 * p(4) - 35.0 * e2 + 2.0) * e2 * ln1p
        + PI4 * (-72.0 * p(7) + 144.0 * p(6) - 72.0 * p(5) + 144.0 * p(4) - 18.0 * p(3) + 36.0 * e2) * q
        - (e - 1.0)
            * (6.0 * p(10) + 6.0 * p(9) - 47.0 * p(8) - 47.0 * p(7) + 78.0 * p(6) + 78.0 * p(5)
                + 3.0 * (48.0 * PI4 * q - 13.0) * p(4)
                - 39.0 * p(3)
                + 2.0 * (72.0 * PI4 * q + 1.0) * e2
                + 2.0 * e
                + 36.0 * PI4 * q)
            * e
            * ln1m
        - 2.0 * PI2;
    b / (p(4) * (1.0 - e2).powi(5))
}

pub fn g_l_plus(e: Eccentricity) -> f64 {
    if e.get() < TAYLOR_SWITCH {
        horner(&taylor::G_L_PLUS, e.get())
    } else {
        g_l_plus_direct(e.get())
    }
}

/// `ǧ_{L,−}(e)`, the bound used below the switch point.
pub fn g_l_minus_check(e: Eccentricity) -> f64 {
    if e.get() < TAYLOR_SWITCH {
        horner(&taylor::G_L_MINUS_CHECK, e.get())
    } else {
        g_l_minus_check_direct(e.get())
    }
}

/// `ǧ̃(e)`.
pub fn g_tilde_check(e: Eccentricity) -> f64 {
    if e.get() < TAYLOR_SWITCH {
        horner(&taylor::G_TILDE_CHECK, e.get())
    } else {
        g_tilde_check_direct(e.get())
    }
}

/// Small-e upper bound for ρ₂: `π²/2 − 2e + π²e²/4`, valid for e ≤ 224/(27π²).
pub fn rho2_hi_small(e: f64) -> f64 {
    PI2 / 2.0 - 2.0 * e + PI2 * e * e / 4.0
}

/// `(e + ln(1 − e))/e² = −Σ_{n≥2} eⁿ⁻²/n`, by series near 0.
fn log_remainder_2(e: f64) -> f64 {
    if e < 0.1 {
        -(2..40).map(|n| e.powi(n - 2) / n as f64).sum::<f64>()
    } else {
        (e + (1.0 - e).ln()) / (e * e)
    }
}

/// Upper bound for ρ₂ valid on all of [0, 1): `−π²(e + ln(1 − e))/(e²(1 + e))`.
pub fn rho2_hi_large(e: f64) -> f64 {
    -PI2 * log_remainder_2(e) / (1.0 + e)
}

fn require_positive(e: Eccentricity, what: &str) -> Result<f64> {
    if e.get() > 0.0 {
        Ok(e.get())
    } else {
        Err(Error::invalid(format!("{what} has a pole at e = 0")))
    }
}

/// `ĝ_{L,−}(e) = ǧ_{L,−}(e) + 3/(2e²(1−e²)²)·(ρ₂^{hi,large} − ρ₂^{hi,small})`.
pub fn g_l_minus_hat(e: Eccentricity) -> Result<f64> {
    let ev = require_positive(e, "the hat bound")?;
    let w = 1.0 - ev * ev;
    Ok(g_l_minus_check(e) + 3.0 / (2.0 * ev * ev * w * w) * (rho2_hi_large(ev) - rho2_hi_small(ev)))
}

/// `ĝ̃(e) = ǧ̃(e) + ã₂(e)·(ρ₂^{hi,large} − ρ₂^{hi,small})`.
pub fn g_tilde_hat(e: Eccentricity) -> Result<f64> {
    let ev = require_positive(e, "the hat bound")?;
    Ok(g_tilde_check(e) + ta2(ev) * (rho2_hi_large(ev) - rho2_hi_small(ev)))
}

/// Brackets for the ρ-integrals. `lower ≤ ρ ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Bracket of `ρ₀(e, θ)` for θ ∈ [0, π]. The upper end is the chord
/// `θ/(1 − e²)^{3/2}` of the convex function ρ₀ on [0, π].
pub fn rho0_bracket(e: Eccentricity, theta: f64) -> Bracket {
    let e = e.get();
    let w = 1.0 - e * e;
    Bracket {
        lower: theta / (w * (1.0 + e)) - e / (w * (1.0 - e)),
        upper: theta / w.powf(1.5),
    }
}

pub fn rho1_bracket(e: Eccentricity) -> Bracket {
    let e = e.get();
    let w = 1.0 - e * e;
    Bracket {
        lower: PI2 / (2.0 * (1.0 - e) * (1.0 + e).powi(2)) - big_l(e) / w,
        upper: PI2 / (2.0 * w.powf(1.5)),
    }
}

/// Bracket of ρ₂ with the piecewise upper bound switching at `e0`.
pub fn rho2_bracket(e: Eccentricity, e0: f64) -> Bracket {
    let e = e.get();
    Bracket {
        lower: PI2 / 2.0 - 2.0 * e,
        upper: if e < e0 { rho2_hi_small(e) } else { rho2_hi_large(e) },
    }
}

/// `((2 − e)e + 2(1 − e)ln(1 − e))/e³ = Σ_{n≥3} 2eⁿ⁻³/(n(n − 1))`.
fn log_remainder_3(e: f64) -> f64 {
    if e < 0.1 {
        (3..40).map(|n| 2.0 * e.powi(n - 3) / (n * (n - 1)) as f64).sum()
    } else {
        ((2.0 - e) * e + 2.0 * (1.0 - e) * (1.0 - e).ln()) / e.powi(3)
    }
}

/// Bracket of ρ₃. The lower end is the trivial bound `ρ₃ ≥ 0`.
pub fn rho3_bracket(e: Eccentricity) -> Bracket {
    let e = e.get();
    let w = 1.0 - e * e;
    let upper = (PI * (w.sqrt() / 2.0 + 0.5).ln() - (e + 1.0).ln()) / w
        + PI3 * ((1.0 - e) / (1.0 + e)).sqrt() * log_remainder_3(e) / (2.0 * w.powf(1.5));
    Bracket { lower: 0.0, upper }
}

/// Direct evaluation without the Taylor switch, for continuity checks.
#[doc(hidden)]
pub fn direct_values(e: Eccentricity) -> Result<[f64; 6]> {
    let ev = e.get();
    Ok([
        f_l_plus_direct(e)?,
        f_l_minus_direct(e)?,
        f_tilde_direct(e)?,
        g_l_plus_direct(ev),
        g_l_minus_check_direct(ev),
        g_tilde_check_direct(ev),
    ])
}
