//! Named verification suites. Each check records what was measured, what
//! was expected and how the two were compared; failures are report
//! content, not errors.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::configurations::{q_max, XiRule};
use crate::error::{Error, Result};
use crate::hill_index::{morse_index, Omega, SturmLiouvilleSpec, DEFAULT_NULL_TOL};
use crate::kepler_core::{rho0, rho_integrals, Eccentricity};
use crate::ode_engine::{kepler_closed_form_deviation, monodromy_with, MonodromyOptions};
use crate::configurations::FamilySpec;
use crate::trace_engine::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kepler,
    Traces,
    Indices,
    Gon9,
    All,
}

impl Suite {
    pub const EACH: [Suite; 4] = [Suite::Kepler, Suite::Traces, Suite::Indices, Suite::Gon9];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Kepler => "kepler",
            Suite::Traces => "traces",
            Suite::Indices => "indices",
            Suite::Gon9 => "gon9",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kepler" => Ok(Suite::Kepler),
            "traces" => Ok(Suite::Traces),
            "indices" => Ok(Suite::Indices),
            "gon9" => Ok(Suite::Gon9),
            "all" => Ok(Suite::All),
            other => Err(Error::invalid(format!("unknown verify suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tol`
    Abs,
    /// `|measured − expected| ≤ tol·|expected|`
    Rel,
    /// `measured ≤ expected + tol`
    AtMost,
    /// `measured ≥ expected − tol`
    AtLeast,
    /// Reported only.
    Info,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Out of tolerance for a reason recorded in the note; not a failure.
    DocumentedDeviation,
    Info,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::DocumentedDeviation => "FAIL (documented deviation)",
            CheckStatus::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub comparison: Comparison,
    pub status: CheckStatus,
    pub note: Option<String>,
}

impl Check {
    pub fn new(suite: Suite, name: impl Into<String>, measured: f64, expected: f64, tol: f64, comparison: Comparison) -> Self {
        let ok = match comparison {
            Comparison::Abs => (measured - expected).abs() <= tol,
            Comparison::Rel => (measured - expected).abs() <= tol * expected.abs(),
            Comparison::AtMost => measured <= expected + tol,
            Comparison::AtLeast => measured >= expected - tol,
            Comparison::Info => true,
        };
        let status = match (comparison, ok) {
            (Comparison::Info, _) => CheckStatus::Info,
            (_, true) => CheckStatus::Pass,
            (_, false) => CheckStatus::Fail,
        };
        Check { suite: suite.as_str().into(), name: name.into(), measured, expected, tol, comparison, status, note: None }
    }

    /// A check that fails because of a known, explained discrepancy.
    pub fn known_deviation(mut self, note: impl Into<String>) -> Self {
        if self.status == CheckStatus::Fail {
            self.status = CheckStatus::DocumentedDeviation;
        }
        self.note = Some(note.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn errored(suite: Suite, name: impl Into<String>, expected: f64, err: &Error) -> Self {
        let mut c = Check::new(suite, name, f64::NAN, expected, 0.0, Comparison::Abs);
        c.status = CheckStatus::Fail;
        c.note = Some(err.to_string());
        c
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::Abs => format!("expected {:.6e} ± {:.1e}", self.expected, self.tol),
            Comparison::Rel => format!("expected {:.6e} ± {:.1e} rel", self.expected, self.tol),
            Comparison::AtMost => format!("threshold ≤ {:.3e}", self.expected + self.tol),
            Comparison::AtLeast => format!("threshold ≥ {:.3e}", self.expected - self.tol),
            Comparison::Info => String::from("diagnostic"),
        };
        write!(f, "{} [{}] {}: measured {:.6e}, {}", self.status.as_str(), self.suite, self.name, self.measured, op)?;
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let count = |s: CheckStatus| self.checks.iter().filter(|c| c.status == s).count();
        writeln!(
            f,
            "{} passed, {} failed, {} documented deviations, {} diagnostics",
            count(CheckStatus::Pass),
            count(CheckStatus::Fail),
            count(CheckStatus::DocumentedDeviation),
            count(CheckStatus::Info)
        )
    }
}

fn ecc(e: f64) -> Eccentricity {
    Eccentricity::new(e).expect("suite eccentricities are valid")
}

pub fn run_suite(suite: Suite) -> VerifyReport {
    let checks = match suite {
        Suite::Kepler => verify_kepler(&[0.0, 0.3, 0.6, 0.9], 1e-8).checks,
        Suite::Traces => traces(),
        Suite::Indices => indices(),
        Suite::Gon9 => gon9(),
        Suite::All => Suite::EACH.into_iter().flat_map(|s| run_suite(s).checks).collect(),
    };
    VerifyReport { checks }
}

/// Closed-form fundamental solution against the integrator on a 32-point
/// θ-grid over one period.
pub fn verify_kepler(es: &[f64], tol: f64) -> VerifyReport {
    let checks = es
        .iter()
        .map(|&e| {
            let name = format!("max |gamma_closed - gamma_ode| e={e}");
            match Eccentricity::new(e).and_then(|e| kepler_closed_form_deviation(e, 32, 1e-12, 1e-12)) {
                Ok(d) => Check::new(Suite::Kepler, name, d, 0.0, tol, Comparison::AtMost),
                Err(err) => Check::errored(Suite::Kepler, name, 0.0, &err),
            }
        })
        .collect();
    VerifyReport { checks }
}

fn traces() -> Vec<Check> {
    let s = Suite::Traces;
    let mut out = Vec::new();
    let push = |out: &mut Vec<Check>, name: String, r: Result<(f64, f64)>, tol: f64| {
        out.push(match r {
            Ok((m, x)) => Check::new(s, name, m, x, tol, Comparison::Rel),
            Err(err) => Check::errored(s, name, f64::NAN, &err),
        })
    };
    for ev in [0.1, 0.3, 0.5, 0.7] {
        let e = ecc(ev);
        for (label, half) in [
            (PerturbationLabel::DL, Half::Plus),
            (PerturbationLabel::DL, Half::Minus),
            (PerturbationLabel::DTilde, Half::Minus),
        ] {
            let direct = trace_value(label, e, half, TraceMethod::DirectG);
            let quad = trace_value(label, e, half, TraceMethod::HalfTraceQuadrature);
            let closed = trace_value(label, e, half, TraceMethod::ClosedForm);
            let tag = format!("{} {} e={ev}", label.as_str(), half.as_str());
            let pair = |a: &Result<f64>| -> Result<(f64, f64)> {
                let d = direct.as_ref().map_err(|e| Error::InvalidState(e.to_string()))?;
                let m = a.as_ref().map_err(|e| Error::InvalidState(e.to_string()))?;
                Ok((*m, *d))
            };
            push(&mut out, format!("half-trace vs direct-G, {tag}"), pair(&quad), 1e-5);
            push(&mut out, format!("closed form vs direct-G, {tag}"), pair(&closed), 1e-5);
        }
    }
    for ev in [0.1, 0.5] {
        let e = ecc(ev);
        let name = format!("verbatim minus-half index range vs direct-G, D_L e={ev}");
        let d = PerturbationD::d_l();
        let r = f_half_minus_verbatim(&d, e).and_then(|v| Ok((v, trace_value(PerturbationLabel::DL, e, Half::Minus, TraceMethod::DirectG)?)));
        match r {
            Ok((v, x)) => out.push(Check::new(s, name, v, x, 1e-5, Comparison::Rel).known_deviation(
                "the literal row/column ranges of the minus half pick the wrong frame block; direct-G is authoritative and the corrected ranges agree with it",
            )),
            Err(err) => out.push(Check::errored(s, name, f64::NAN, &err)),
        }
    }

    out.extend(reference_values());
    out.extend(domination());
    out
}

fn reference_values() -> Vec<Check> {
    let s = Suite::Traces;
    let z = Eccentricity::ZERO;
    let e01 = ecc(E0_DEFAULT);
    let lag = |f: f64| 9.0 - (3.0 - 1.0 / f.sqrt()).powi(2);
    let eul = |f: f64| 0.5 / f.sqrt();
    let inv = |f: f64| 1.0 / f.sqrt();
    let hat_gap = "the check and hat g-bounds at e0 = 0.1 are smaller than the reference value implies, so the boundary lies further out; no consistent reading of the formula reproduces the reference";
    let mut out = Vec::new();
    let mut add = |name: &str, r: Result<f64>, expected: f64, note: Option<&str>| {
        let c = match r {
            Ok(v) => Check::new(s, name, v, expected, 5e-4, Comparison::Abs),
            Err(err) => Check::errored(s, name, expected, &err),
        };
        out.push(match note {
            Some(n) => c.known_deviation(n),
            None => c,
        });
    };
    add("Lagrange intercept 9-(3-1/sqrt g_L-(0))^2", Ok(lag(g_l_minus_check(z))), 0.7469, None);
    add("Lagrange at e0=0.1, check g", Ok(lag(g_l_minus_check(e01))), 0.4077, Some(hat_gap));
    add("Lagrange at e0=0.1, hat g", g_l_minus_hat(e01).map(lag), 0.4006, Some(hat_gap));
    add("Euler intercept 1/(2 sqrt g_L-(0))", Ok(eul(g_l_minus_check(z))), 0.0636, None);
    add("Euler at e0=0.1, check g", Ok(eul(g_l_minus_check(e01))), 0.0344, Some(hat_gap));
    add("Euler at e0=0.1, hat g", g_l_minus_hat(e01).map(eul), 0.0338, Some(hat_gap));
    add("(alpha,eta) 1/sqrt f~(0)", f_tilde(z).map(inv), 0.0523, None);
    add(
        "(alpha,eta) 1/sqrt g~(0)",
        Ok(inv(g_tilde_check(z))),
        0.0193,
        Some("this g~ reproduces every (1+9)-gon reference value, so the 0.0193 reference is taken to be a typo"),
    );
    add("(alpha,eta) at e0=0.1, check g~", Ok(inv(g_tilde_check(e01))), 0.0189, None);
    add("(alpha,eta) at e0=0.1, hat g~", g_tilde_hat(e01).map(inv), 0.0187, None);
    out
}

fn domination() -> Vec<Check> {
    let s = Suite::Traces;
    let mut gaps = [f64::INFINITY; 3];
    let mut bracket_misses = 0usize;
    let mut errors = Vec::new();
    for i in 0..50 {
        let e = ecc(0.95 * i as f64 / 49.0);
        let r = (|| -> Result<()> {
            let pairs = [
                (g_l_plus(e), f_l_plus(e)?),
                (g_l_minus_check(e), f_l_minus(e)?),
                (g_tilde_check(e), f_tilde(e)?),
            ];
            for (k, (g, f)) in pairs.into_iter().enumerate() {
                gaps[k] = gaps[k].min((g - f) / f);
            }
            if e.get() > 0.0 {
                gaps[1] = gaps[1].min((g_l_minus_hat(e)? - f_l_minus(e)?) / f_l_minus(e)?);
                gaps[2] = gaps[2].min((g_tilde_hat(e)? - f_tilde(e)?) / f_tilde(e)?);
            }
            let rho = rho_integrals(e)?;
            bracket_misses += usize::from(!rho1_bracket(e).contains(rho.rho1));
            bracket_misses += usize::from(!rho2_bracket(e, E0_DEFAULT).contains(rho.rho2));
            bracket_misses += usize::from(!rho3_bracket(e).contains(rho.rho3));
            for j in 0..=8 {
                let t = std::f64::consts::PI * j as f64 / 8.0;
                let b = rho0_bracket(e, t);
                let v = rho0(e, t);
                bracket_misses += usize::from(!(b.lower <= v + 1e-12 && v <= b.upper + 1e-12));
            }
            Ok(())
        })();
        if let Err(err) = r {
            errors.push(err);
        }
    }
    let mut out = vec![
        Check::new(s, "min (g_L+ - f_L+)/f_L+ over 50-point grid in [0, 0.95]", gaps[0], 0.0, 0.0, Comparison::AtLeast),
        Check::new(s, "min (g_L- - f_L-)/f_L- over the grid, check and hat", gaps[1], 0.0, 0.0, Comparison::AtLeast),
        Check::new(s, "min (g~ - f~)/f~ over the grid, check and hat", gaps[2], 0.0, 0.0, Comparison::AtLeast),
        Check::new(s, "rho bracket violations over the grid", bracket_misses as f64, 0.0, 0.0, Comparison::AtMost),
    ];
    out.extend(errors.iter().map(|err| Check::errored(s, "bound evaluation on the grid", 0.0, err)));
    out
}

fn indices() -> Vec<Check> {
    let s = Suite::Indices;
    let mut out = Vec::new();
    for ev in [0.0, 0.5, 0.9] {
        let spec = SturmLiouvilleSpec::kepler(ecc(ev));
        for (omega, expected) in [(Omega::One, (0, 3)), (Omega::MinusOne, (2, 0))] {
            let tag = format!("omega={omega} e={ev}, K=128 vs 256");
            match morse_index(&spec, omega, 128, DEFAULT_NULL_TOL) {
                Ok(r) => {
                    out.push(Check::new(s, format!("Kepler Morse index, {tag}"), r.morse as f64, expected.0 as f64, 0.0, Comparison::Abs));
                    out.push(Check::new(s, format!("Kepler nullity, {tag}"), r.nullity as f64, expected.1 as f64, 0.0, Comparison::Abs));
                }
                Err(err) => out.push(Check::errored(s, format!("Kepler index pair, {tag}"), expected.0 as f64, &err)),
            }
        }
    }
    out
}

fn gon9() -> Vec<Check> {
    let s = Suite::Gon9;
    let e0 = E0_DEFAULT;
    let mut out = vec![Check::new(s, "Q_max(9)", q_max(9), 4.9047, 1e-4, Comparison::Abs)];
    let rule = XiRule::PrintedReduction;
    let mut beta = |name: &str, e: f64, expected: f64, rule: XiRule, info: bool| -> Option<f64> {
        match gon_boundary_beta(9, ecc(e), e0, rule) {
            Ok(Some(b)) => {
                let cmp = if info { Comparison::Info } else { Comparison::Abs };
                out.push(Check::new(s, name, b, expected, 5e-4, cmp));
                Some(b)
            }
            Ok(None) => {
                out.push(Check::new(s, name, f64::NAN, expected, 5e-4, Comparison::Abs).with_note("region is empty"));
                None
            }
            Err(err) => {
                out.push(Check::errored(s, name, expected, &err));
                None
            }
        }
    };
    beta("beta-axis intercept (e=0)", 0.0, 0.00445, rule, false);
    beta("discontinuity point just below e0=0.1", E0_DEFAULT - 1e-9, 0.00422, rule, false);
    beta("discontinuity point at e0=0.1", E0_DEFAULT, 0.00418, rule, false);
    let all = beta("beta-axis intercept, max over every envelope corner", 0.0, f64::NAN, XiRule::AllCorners, true);
    let opts = MonodromyOptions { class_tol: 1e-6, ..MonodromyOptions::default() };
    if let Some(b) = all {
        for ev in [0.0, 0.05] {
            let m = 1.0 / (0.5 * b);
            let name = format!("monodromy blocks linearly stable inside the all-corner region, m={m:.1}, e={ev}");
            let r = FamilySpec::gon(9, m)
                .and_then(|f| f.system(ecc(ev)))
                .and_then(|sys| monodromy_with(&sys, opts))
                .and_then(|mono| Ok((gon_region_member_with(9, m, ecc(ev), e0, XiRule::AllCorners)?, mono.all_linearly_stable())));
            match r {
                Ok((inside, stable)) => {
                    let c = Check::new(s, name, f64::from(u8::from(stable)), 1.0, 0.0, Comparison::Abs);
                    out.push(if inside { c } else { c.with_note("point is outside the region") });
                }
                Err(err) => out.push(Check::errored(s, name, 1.0, &err)),
            }
        }
    }
    // The single-corner reduction keeps only the l = 1 corner; its region reaches
    // points where the l = 4 block is unstable.
    let m = 281.0;
    let name = format!("largest multiplier modulus of block l=4 at m={m}, e=0 (inside the printed-reduction region only)");
    match FamilySpec::gon_block(9, m, 4).and_then(|f| f.system(Eccentricity::ZERO)).and_then(|sys| monodromy_with(&sys, opts)) {
        Ok(mono) => {
            let r = mono.eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
            out.push(Check::new(s, name, r, 1.0, 0.0, Comparison::Info));
        }
        Err(err) => out.push(Check::errored(s, name, 1.0, &err)),
    }
    out
}
