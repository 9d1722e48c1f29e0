//! Trace formulas for the Hilbert–Schmidt operator `F = D(A − B)⁻¹` built
//! on the Kepler fundamental solution, the ± half traces, the explicit
//! bounds and the family bound curves they induce.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{Matrix4, Matrix4x2};
use serde::{Deserialize, Serialize};

use crate::configurations::{q_max, xi_gon_with, XiRule};
use crate::error::{Error, Result};
use crate::kepler_core::{gamma_matrix, j4, Eccentricity};
use crate::quadrature::{integrate_mat, Estimate, QuadOptions};

pub mod closed_form;
mod taylor;

pub use closed_form::{
    f_l_minus, f_l_plus, f_tilde, g_l_minus_check, g_l_minus_hat, g_l_plus, g_tilde_check, g_tilde_hat,
    rho0_bracket, rho1_bracket, rho2_bracket, rho3_bracket, Bracket,
};

/// Largest admissible switch point `224/(27π²)` for the piecewise bounds.
pub const E0_MAX: f64 = 224.0 / (27.0 * PI * PI);
/// Default switch point.
pub const E0_DEFAULT: f64 = 0.1;

type Evaluator = Arc<dyn Fn(f64, f64) -> Matrix4<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationLabel {
    #[serde(rename = "D_L")]
    DL,
    #[serde(rename = "D_E")]
    DE,
    #[serde(rename = "D_tilde")]
    DTilde,
    #[serde(rename = "custom")]
    Custom,
}

impl PerturbationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationLabel::DL => "D_L",
            PerturbationLabel::DE => "D_E",
            PerturbationLabel::DTilde => "D_tilde",
            PerturbationLabel::Custom => "custom",
        }
    }
}

impl FromStr for PerturbationLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dl" | "d_l" => Ok(PerturbationLabel::DL),
            "de" | "d_e" => Ok(PerturbationLabel::DE),
            "dtilde" | "d_tilde" => Ok(PerturbationLabel::DTilde),
            "custom" => Ok(PerturbationLabel::Custom),
            _ => Err(Error::invalid(format!("unknown perturbation '{s}'"))),
        }
    }
}

/// A symmetric 4x4 perturbation `D(e, θ)`, scaled by `scale`.
#[derive(Clone)]
pub struct PerturbationD {
    label: PerturbationLabel,
    scale: f64,
    evaluator: Evaluator,
}

impl fmt::Debug for PerturbationD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationD")
            .field("label", &self.label)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

fn lower_block(d: [f64; 2]) -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, 0.0, d[0], d[1]))
}

impl PerturbationD {
    /// `D_L = diag(0, 0, Ñ/(2(1 + e cos θ)))` with `Ñ = diag(1, −1)`.
    pub fn d_l() -> Self {
        PerturbationD {
            label: PerturbationLabel::DL,
            scale: 1.0,
            evaluator: Arc::new(|e, t| {
                let w = 0.5 / (1.0 + e * t.cos());
                lower_block([w, -w])
            }),
        }
    }

    /// `D_E = −D_L`.
    pub fn d_e() -> Self {
        PerturbationD {
            label: PerturbationLabel::DE,
            ..Self::d_l().scaled(-1.0)
        }
    }

    /// `D̃ = diag(0, 0, I₂/(1 + e cos θ))`.
    pub fn d_tilde() -> Self {
        PerturbationD {
            label: PerturbationLabel::DTilde,
            scale: 1.0,
            evaluator: Arc::new(|e, t| {
                let w = 1.0 / (1.0 + e * t.cos());
                lower_block([w, w])
            }),
        }
    }

    /// A user-supplied `D(e, θ)`. Symmetry is checked at evaluation time
    /// by [`PerturbationD::check_symmetric`].
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> Matrix4<f64> + Send + Sync + 'static,
    {
        PerturbationD {
            label: PerturbationLabel::Custom,
            scale: 1.0,
            evaluator: Arc::new(f),
        }
    }

    pub fn from_label(label: PerturbationLabel) -> Result<Self> {
        match label {
            PerturbationLabel::DL => Ok(Self::d_l()),
            PerturbationLabel::DE => Ok(Self::d_e()),
            PerturbationLabel::DTilde => Ok(Self::d_tilde()),
            PerturbationLabel::Custom => Err(Error::invalid("a custom perturbation needs an evaluator")),
        }
    }

    /// `σD`.
    pub fn scaled(self, sigma: f64) -> Self {
        PerturbationD {
            scale: self.scale * sigma,
            ..self
        }
    }

    pub fn label(&self) -> PerturbationLabel {
        self.label
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, e: f64, theta: f64) -> Matrix4<f64> {
        (self.evaluator)(e, theta) * self.scale
    }

    /// Fails if `D(θ)` is asymmetric or non-finite at any of `samples`
    /// equally spaced points of `[0, 2π]`.
    pub fn check_symmetric(&self, e: Eccentricity, samples: usize) -> Result<()> {
        for i in 0..=samples.max(1) {
            let t = 2.0 * PI * i as f64 / samples.max(1) as f64;
            let d = self.eval(e.get(), t);
            if d.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("D({t}) is not finite")));
            }
            let asym = (d - d.transpose()).amax();
            if asym > 1e-12 * d.amax().max(1.0) {
                return Err(Error::invalid(format!("D({t}) is not symmetric (defect {asym:e})")));
            }
        }
        Ok(())
    }

    /// `J γᵀ D γ` at θ.
    pub fn j_hat(&self, e: Eccentricity, theta: f64) -> Matrix4<f64> {
        let g = gamma_matrix(e.get(), theta);
        j4() * g.transpose() * self.eval(e.get(), theta) * g
    }
}

/// Which half of the ℤ₂ split of the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Plus,
    Minus,
}

impl Half {
    pub const BOTH: [Half; 2] = [Half::Plus, Half::Minus];

    pub fn as_str(self) -> &'static str {
        match self {
            Half::Plus => "plus",
            Half::Minus => "minus",
        }
    }
}

impl FromStr for Half {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Half::Plus),
            "minus" | "-" => Ok(Half::Minus),
            _ => Err(Error::invalid(format!("unknown half '{s}'"))),
        }
    }
}

/// Boundary frames for one half at a given eccentricity.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub e: Eccentricity,
    pub half: Half,
    pub z0: Matrix4x2<f64>,
    pub z1: Matrix4x2<f64>,
    /// `(Z₀, γ(π)⁻¹Z₁)`.
    pub p: Matrix4<f64>,
    /// `(Z₀, 0)`.
    pub q_d: Matrix4<f64>,
    /// The conjugator 𝒫±.
    pub script_p: Matrix4<f64>,
    /// `𝒫⁻¹ Q_d P⁻¹ 𝒫`, the projector selecting the half-trace index set.
    pub gamma: Matrix4<f64>,
}

fn frame(cols: [usize; 2]) -> Matrix4x2<f64> {
    let mut z = Matrix4x2::zeros();
    z[(cols[0], 0)] = 1.0;
    z[(cols[1], 1)] = 1.0;
    z
}

fn script_p(e: f64, half: Half) -> Matrix4<f64> {
    match half {
        Half::Plus => {
            let k = 3.0 * (1.0 + e) * PI / (2.0 * (1.0 - e) * (1.0 - e * e).powf(1.5));
            Matrix4::new(
                0.0, 1.0 / (1.0 + e), k, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                -(1.0 + e), 0.0, 0.0, 1.0, //
                0.0, 0.0, -k * (1.0 + e), 0.0,
            )
        }
        Half::Minus => {
            let s = (1.0 - e * e).sqrt();
            let w = s * s * s;
            Matrix4::new(
                1.0, 0.0, -3.0 * PI * (1.0 - e) / w, -3.0 * PI / w, //
                0.0, 0.0, -(3.0 - e) / (1.0 + e), -2.0 / (1.0 + e), //
                0.0, 0.0, 4.0 / (1.0 + e), (3.0 + e) / (1.0 + e), //
                0.0, 1.0, 3.0 * PI / s, 3.0 * PI * (1.0 + e) / w,
            )
        }
    }
}

fn invert(m: &Matrix4<f64>, what: &str) -> Result<Matrix4<f64>> {
    m.try_inverse()
        .ok_or_else(|| Error::InvalidState(format!("{what} is singular")))
}

impl BoundaryData {
    pub fn new(e: Eccentricity, half: Half) -> Result<Self> {
        let (c0, c1) = match half {
            Half::Plus => ([1, 2], [0, 3]),
            Half::Minus => ([0, 3], [1, 2]),
        };
        let z0 = frame(c0);
        let z1 = frame(c1);
        let g_pi = gamma_matrix(e.get(), PI);
        let g_inv = invert(&g_pi, "γ(π)")?;
        let mut p = Matrix4::zeros();
        p.fixed_view_mut::<4, 2>(0, 0).copy_from(&z0);
        p.fixed_view_mut::<4, 2>(0, 2).copy_from(&(g_inv * z1));
        let mut q_d = Matrix4::zeros();
        q_d.fixed_view_mut::<4, 2>(0, 0).copy_from(&z0);
        let sp = script_p(e.get(), half);
        let gamma = invert(&sp, "𝒫")? * q_d * invert(&p, "P")? * sp;
        Ok(BoundaryData {
            e,
            half,
            z0,
            z1,
            p,
            q_d,
            script_p: sp,
            gamma,
        })
    }

    /// `Z₀ᵀ J Z₀`, zero for a Lagrangian frame.
    pub fn lagrangian_defect(&self) -> f64 {
        (self.z0.transpose() * j4() * self.z0).amax()
    }

    /// Row and column index sets (0-based) of the half-trace sum.
    pub fn index_sets(&self) -> ([usize; 2], [usize; 2]) {
        match self.half {
            Half::Plus => ([0, 3], [1, 2]),
            Half::Minus => ([0, 1], [2, 3]),
        }
    }
}

fn outer_opts(abs_tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// `∫₀^T L(t) (∫₀^t R(s) ds) dt` by nested adaptive Gauss–Kronrod.
fn nested<L, R>(left: L, right: R, t_end: f64, abs_tol: f64) -> Result<Estimate<Matrix4<f64>>>
where
    L: Fn(f64) -> Matrix4<f64>,
    R: Fn(f64) -> Matrix4<f64>,
{
    let inner_opts = QuadOptions {
        abs_tol: abs_tol / (10.0 * t_end.max(1.0)),
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let failure = RefCell::new(None);
    let evals = RefCell::new(0usize);
    let outer = integrate_mat(
        |t| match integrate_mat(&right, 0.0, t, inner_opts) {
            Ok(k) => {
                *evals.borrow_mut() += k.evaluations;
                left(t) * k.value
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                Matrix4::zeros()
            }
        },
        0.0,
        t_end,
        outer_opts(abs_tol),
    )?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(Estimate {
        evaluations: outer.evaluations + evals.into_inner(),
        ..outer
    })
}

/// Absolute accuracy of the iterated integrals.
pub const ITERATED_TOL: f64 = 1e-9;

fn check_span(t_end: f64) -> Result<()> {
    if t_end > 0.0 && t_end <= 2.0 * PI + 1e-12 {
        Ok(())
    } else {
        Err(Error::invalid(format!("integration span {t_end} outside (0, 2π]")))
    }
}

/// `M₁ = ∫₀^T J D̂` and `M₂ = ∫₀^T J D̂(t) ∫₀^t J D̂(s) ds dt`.
pub fn m_pair(d: &PerturbationD, e: Eccentricity, t_end: f64) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    check_span(t_end)?;
    let x = |t: f64| d.j_hat(e, t);
    let m1 = integrate_mat(x, 0.0, t_end, outer_opts(ITERATED_TOL))?.value;
    let m2 = nested(x, x, t_end, ITERATED_TOL)?.value;
    Ok((m1, m2))
}

/// The iterated integral `M_j`, `j ∈ {1, 2}`, over `[0, T]`.
pub fn m_iterated(d: &PerturbationD, e: Eccentricity, j: usize, t_end: f64) -> Result<Matrix4<f64>> {
    check_span(t_end)?;
    let x = |t: f64| d.j_hat(e, t);
    match j {
        1 => Ok(integrate_mat(x, 0.0, t_end, outer_opts(ITERATED_TOL))?.value),
        2 => Ok(nested(x, x, t_end, ITERATED_TOL)?.value),
        _ => Err(Error::invalid(format!("iterated integral order {j} not in {{1, 2}}"))),
    }
}

/// `(Tr F, Tr F²)` with `G_j = P⁻¹ M_j Q_d` over `[0, π]`.
pub fn trace_f_and_f2(d: &PerturbationD, e: Eccentricity, half: &BoundaryData) -> Result<(f64, f64)> {
    if half.e != e {
        return Err(Error::invalid("boundary data built for a different eccentricity"));
    }
    let (m1, m2) = m_pair(d, e, PI)?;
    let p_inv = invert(&half.p, "P")?;
    let g1 = p_inv * m1 * half.q_d;
    let g2 = p_inv * m2 * half.q_d;
    Ok((-g1.trace(), (g1 * g1).trace() - 2.0 * g2.trace()))
}

fn masked_half_trace(d: &PerturbationD, e: Eccentricity, half: Half, rows: [usize; 2], cols: [usize; 2]) -> Result<f64> {
    let sp = script_p(e.get(), half);
    let sp_inv = invert(&sp, "𝒫")?;
    let tilde = |t: f64| sp_inv * d.j_hat(e, t) * sp;
    let mut col_mask = Matrix4::zeros();
    for c in cols {
        col_mask[(c, c)] = 1.0;
    }
    let w = nested(|t| tilde(t) * col_mask, tilde, PI, ITERATED_TOL)?.value;
    Ok(-2.0 * rows.iter().map(|&a| w[(a, a)]).sum::<f64>())
}

/// `f±` from the half-trace double integral
/// `−2 Σ_a Σ_j ∬_{0≤s≤θ≤π} D̃_{aj}(θ) D̃_{ja}(s)`, `D̃ = 𝒫⁻¹ J D̂ 𝒫`.
/// The + half sums rows {1, 4} against columns {2, 3}; the − half sums
/// rows {1, 2} against columns {3, 4}, the complement selected by Γ₋.
pub fn f_half(d: &PerturbationD, e: Eccentricity, half: Half) -> Result<f64> {
    let (rows, cols) = match half {
        Half::Plus => ([0, 3], [1, 2]),
        Half::Minus => ([0, 1], [2, 3]),
    };
    masked_half_trace(d, e, half, rows, cols)
}

/// The − half with rows {3, 4} and columns {2, 3}, taken literally. Kept as a
/// diagnostic: it does not agree with the direct trace.
pub fn f_half_minus_verbatim(d: &PerturbationD, e: Eccentricity) -> Result<f64> {
    masked_half_trace(d, e, Half::Minus, [2, 3], [1, 2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    #[serde(rename = "fL_plus")]
    FLPlus,
    #[serde(rename = "fL_minus")]
    FLMinus,
    #[serde(rename = "fL_max")]
    FLMax,
    #[serde(rename = "gL_plus")]
    GLPlus,
    #[serde(rename = "gL_minus")]
    GLMinus,
    #[serde(rename = "f_tilde")]
    FTilde,
    #[serde(rename = "g_tilde")]
    GTilde,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::FLPlus,
        BoundKind::FLMinus,
        BoundKind::FLMax,
        BoundKind::GLPlus,
        BoundKind::GLMinus,
        BoundKind::FTilde,
        BoundKind::GTilde,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::FLPlus => "fL_plus",
            BoundKind::FLMinus => "fL_minus",
            BoundKind::FLMax => "fL_max",
            BoundKind::GLPlus => "gL_plus",
            BoundKind::GLMinus => "gL_minus",
            BoundKind::FTilde => "f_tilde",
            BoundKind::GTilde => "g_tilde",
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown bound kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMethod {
    ClosedForm,
    HalfTraceQuadrature,
    #[serde(rename = "direct_G")]
    DirectG,
}

impl TraceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceMethod::ClosedForm => "closed_form",
            TraceMethod::HalfTraceQuadrature => "half_trace_quadrature",
            TraceMethod::DirectG => "direct_G",
        }
    }
}

impl FromStr for TraceMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed_form" => Ok(TraceMethod::ClosedForm),
            "quadrature" | "half_trace_quadrature" => Ok(TraceMethod::HalfTraceQuadrature),
            "direct" | "direct_G" | "direct_g" => Ok(TraceMethod::DirectG),
            _ => Err(Error::invalid(format!("unknown trace method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceBound {
    pub e: Eccentricity,
    pub value: f64,
    pub method: TraceMethod,
    pub kind: BoundKind,
}

fn check_e0(e0: f64) -> Result<()> {
    if e0 > 0.0 && e0 <= E0_MAX {
        Ok(())
    } else {
        Err(Error::invalid(format!("switch point e0 = {e0} outside (0, 224/(27π²)]")))
    }
}

/// Evaluates one of the explicit bounds. The g-kinds switch from the
/// check form to the hat form at `e0`.
pub fn closed_form_bound(kind: BoundKind, e: Eccentricity, e0: f64) -> Result<TraceBound> {
    let value = match kind {
        BoundKind::FLPlus => f_l_plus(e)?,
        BoundKind::FLMinus => f_l_minus(e)?,
        BoundKind::FLMax => f_l_plus(e)?.max(f_l_minus(e)?),
        BoundKind::GLPlus => g_l_plus(e),
        BoundKind::GLMinus => {
            check_e0(e0)?;
            if e.get() < e0 {
                g_l_minus_check(e)
            } else {
                g_l_minus_hat(e)?
            }
        }
        BoundKind::FTilde => f_tilde(e)?,
        BoundKind::GTilde => {
            check_e0(e0)?;
            if e.get() < e0 {
                g_tilde_check(e)
            } else {
                g_tilde_hat(e)?
            }
        }
    };
    Ok(TraceBound {
        e,
        value,
        method: TraceMethod::ClosedForm,
        kind,
    })
}

/// `Tr F²` for a named perturbation and half by any of the three routes.
/// The closed-form route exists for `D_L`/`D_E` (both halves) and for `D̃`
/// (whose larger half is the − half).
pub fn trace_value(label: PerturbationLabel, e: Eccentricity, half: Half, method: TraceMethod) -> Result<f64> {
    match method {
        TraceMethod::ClosedForm => match (label, half) {
            (PerturbationLabel::DL | PerturbationLabel::DE, Half::Plus) => f_l_plus(e),
            (PerturbationLabel::DL | PerturbationLabel::DE, Half::Minus) => f_l_minus(e),
            (PerturbationLabel::DTilde, Half::Minus) => f_tilde(e),
            _ => Err(Error::Unsupported(format!(
                "no closed form for {} on the {} half",
                label.as_str(),
                half.as_str()
            ))),
        },
        TraceMethod::HalfTraceQuadrature => f_half(&PerturbationD::from_label(label)?, e, half),
        TraceMethod::DirectG => {
            let b = BoundaryData::new(e, half)?;
            Ok(trace_f_and_f2(&PerturbationD::from_label(label)?, e, &b)?.1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFamily {
    Lagrange,
    Euler,
    AlphaEta,
}

/// The stability boundary of a family at eccentricity `e`: Lagrange
/// `9 − (3 − 1/√f)²`, Euler `1/(2√f)`, (α,η)-type `1/√f̃`. With `use_g` the
/// explicit g-bounds replace the f-bounds.
pub fn bound_curve(family: BoundFamily, e: Eccentricity, use_g: bool, e0: f64) -> Result<f64> {
    let kind = match (family, use_g) {
        (BoundFamily::Lagrange | BoundFamily::Euler, false) => BoundKind::FLMax,
        (BoundFamily::Lagrange | BoundFamily::Euler, true) => BoundKind::GLMinus,
        (BoundFamily::AlphaEta, false) => BoundKind::FTilde,
        (BoundFamily::AlphaEta, true) => BoundKind::GTilde,
    };
    let f = closed_form_bound(kind, e, e0)?.value;
    Ok(match family {
        BoundFamily::Lagrange => 9.0 - (3.0 - 1.0 / f.sqrt()).powi(2),
        BoundFamily::Euler => 0.5 / f.sqrt(),
        BoundFamily::AlphaEta => 1.0 / f.sqrt(),
    })
}

fn check_gon_n(n: usize) -> Result<()> {
    if n >= 9 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "the (1+n)-gon region is only established for n ≥ 9 (got n = {n})"
        )))
    }
}

/// Membership in the explicit linear-stability region of the (1+n)-gon:
/// `m > 2Q_max(n)` and `Ξ(m) < 1/√g̃(e)`.
pub fn gon_region_member(n: usize, m: f64, e: Eccentricity, e0: f64) -> Result<bool> {
    gon_region_member_with(n, m, e, e0, XiRule::AllCorners)
}

pub fn gon_region_member_with(n: usize, m: f64, e: Eccentricity, e0: f64, rule: XiRule) -> Result<bool> {
    check_gon_n(n)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid(format!("central mass m = {m} must be positive")));
    }
    if m <= 2.0 * q_max(n) {
        return Ok(false);
    }
    let limit = bound_curve(BoundFamily::AlphaEta, e, true, e0)?;
    Ok(xi_gon_with(n, m, rule)? < limit)
}

/// The largest β = 1/m on the region boundary at eccentricity `e`, found by
/// bisection on `Ξ(1/β) = 1/√g̃(e)`. `None` if no β qualifies.
pub fn gon_boundary_beta(n: usize, e: Eccentricity, e0: f64, rule: XiRule) -> Result<Option<f64>> {
    check_gon_n(n)?;
    let limit = bound_curve(BoundFamily::AlphaEta, e, true, e0)?;
    let beta_max = 1.0 / (2.0 * q_max(n));
    let inside = |beta: f64| -> Result<bool> { Ok(xi_gon_with(n, 1.0 / beta, rule)? < limit) };
    let mut lo = 1e-12;
    if !inside(lo)? {
        return Ok(None);
    }
    let mut hi = beta_max * (1.0 - 1e-12);
    if inside(hi)? {
        return Ok(Some(hi));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(Some(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ecc(e: f64) -> Eccentricity {
        Eccentricity::new(e).unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero() {
        let z = PerturbationD::custom(|_, _| Matrix4::zeros());
        let e = ecc(0.3);
        assert_eq!(m_iterated(&z, e, 1, PI).unwrap(), Matrix4::zeros());
        assert_eq!(m_iterated(&z, e, 2, PI).unwrap(), Matrix4::zeros());
        let b = BoundaryData::new(e, Half::Plus).unwrap();
        assert_eq!(trace_f_and_f2(&z, e, &b).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn m1_is_linear() {
        let e = ecc(0.4);
        let a = m_iterated(&PerturbationD::d_l(), e, 1, PI).unwrap();
        let b = m_iterated(&PerturbationD::d_l().scaled(2.0), e, 1, PI).unwrap();
        assert!((b - 2.0 * a).amax() < 1e-12 * a.amax().max(1.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        let d = PerturbationD::d_l();
        assert!(m_iterated(&d, ecc(0.1), 3, PI).is_err());
        assert!(m_iterated(&d, ecc(0.1), 1, 7.0).is_err());
        assert!(closed_form_bound(BoundKind::GTilde, ecc(0.1), 0.9).is_err());
        assert!(matches!(gon_region_member(8, 100.0, ecc(0.0), 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn frames_and_projectors() {
        for &ev in &[0.0, 0.3, 0.8] {
            for h in Half::BOTH {
                let b = BoundaryData::new(ecc(ev), h).unwrap();
                assert_eq!(b.lagrangian_defect(), 0.0);
                let g = b.gamma;
                assert!((g * g - g).amax() < 1e-9);
                let expect = match h {
                    Half::Plus => [1.0, 0.0, 0.0, 1.0],
                    Half::Minus => [1.0, 1.0, 0.0, 0.0],
                };
                let want = Matrix4::from_diagonal(&nalgebra::Vector4::from(expect));
                assert!((g - want).amax() < 1e-9, "{h:?} e={ev}: {g}");
            }
        }
    }

    #[test]
    fn f_half_at_zero() {
        let v = f_half(&PerturbationD::d_l(), Eccentricity::ZERO, Half::Plus).unwrap();
        assert!((v - 61.819270415542).abs() < 1e-7, "{v}");
    }

    #[test]
    fn e0_domain() {
        assert!(closed_form_bound(BoundKind::GLMinus, ecc(0.2), E0_MAX).is_ok());
        assert!(closed_form_bound(BoundKind::GLMinus, ecc(0.2), 0.0).is_err());
        assert!(closed_form_bound(BoundKind::FLPlus, ecc(0.2), 5.0).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!("gL_minus".parse::<BoundKind>().unwrap(), BoundKind::GLMinus);
        assert_eq!("direct".parse::<TraceMethod>().unwrap(), TraceMethod::DirectG);
        assert_eq!("dtilde".parse::<PerturbationLabel>().unwrap(), PerturbationLabel::DTilde);
        assert!("x".parse::<Half>().is_err());
    }
}
