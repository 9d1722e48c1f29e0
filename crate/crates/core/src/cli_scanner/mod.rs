//! Parameter-region scans, bound tables, verification suites and the
//! flat-file formats the `ere` binary reads and writes.

mod io;
mod render;
mod verify;

pub use io::{parse_csv, parse_json, write_csv, write_json};
pub use render::{render_region, CurveSeries};
pub use verify::{run_suite, verify_kepler, Check, Comparison, CheckStatus, Suite, VerifyReport};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::configurations::{zeta, FamilySpec, XiRule};
use crate::error::{Error, Result};
use crate::kepler_core::Eccentricity;
use crate::ode_engine::{monodromy_with, MonodromyOptions};
use crate::symplectic_core::StabilityClass;
use crate::trace_engine::{bound_curve, gon_boundary_beta, gon_region_member_with, BoundFamily, E0_DEFAULT, E0_MAX};

/// Largest eccentricity a scan may reach.
pub const E_SCAN_MAX: f64 = 0.99;

/// A family together with the quantity swept along the parameter axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanFamily {
    /// Axis β ∈ [0, 9].
    Lagrange,
    /// Axis β ∈ [0, 7].
    Euler,
    /// Axis α ≥ 1 at fixed η.
    AlphaEta { eta: f64 },
    /// Axis β = 1/m > 0 for the (1+n)-gon.
    Gon { n: usize, rule: XiRule },
}

impl ScanFamily {
    pub fn spec(&self, param: f64) -> Result<FamilySpec> {
        match *self {
            ScanFamily::Lagrange => FamilySpec::lagrange(param),
            ScanFamily::Euler => FamilySpec::euler(param),
            ScanFamily::AlphaEta { eta } => FamilySpec::alpha_eta(param, eta),
            ScanFamily::Gon { n, .. } => {
                if !(param.is_finite() && param > 0.0) {
                    return Err(Error::invalid(format!("gon axis beta = 1/m must be positive, got {param}")));
                }
                FamilySpec::gon(n, 1.0 / param)
            }
        }
    }

    pub fn axis_label(&self) -> &'static str {
        match self {
            ScanFamily::Lagrange | ScanFamily::Euler => "β",
            ScanFamily::AlphaEta { .. } => "α",
            ScanFamily::Gon { .. } => "β = 1/m",
        }
    }

    /// The class every point strictly inside the analytic region must have.
    /// The (α,η) region only pins the ω = −1 index, so nothing is implied.
    pub fn region_class(&self) -> Option<StabilityClass> {
        match self {
            ScanFamily::Lagrange | ScanFamily::Gon { .. } => Some(StabilityClass::EE),
            ScanFamily::Euler => Some(StabilityClass::EH),
            ScanFamily::AlphaEta { .. } => None,
        }
    }

    fn check_axis(&self, axis: &Axis) -> Result<()> {
        for p in [axis.min, axis.max] {
            self.spec(p)?;
        }
        Ok(())
    }

    /// Strict membership in the explicit stability region. β = 0 (and
    /// ζ = 0) is the Kepler system itself, which sits on the boundary.
    pub fn inside_bound(&self, param: f64, e: Eccentricity, use_g: bool, e0: f64) -> Result<bool> {
        match *self {
            ScanFamily::Lagrange => Ok(param > 0.0 && param < bound_curve(BoundFamily::Lagrange, e, use_g, e0)?),
            ScanFamily::Euler => Ok(param > 0.0 && param < bound_curve(BoundFamily::Euler, e, use_g, e0)?),
            ScanFamily::AlphaEta { eta } => {
                let z = zeta(param, eta);
                Ok(z > 0.0 && z < bound_curve(BoundFamily::AlphaEta, e, use_g, e0)?)
            }
            ScanFamily::Gon { n, rule } => gon_region_member_with(n, 1.0 / param, e, e0, rule),
        }
    }
}

impl fmt::Display for ScanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanFamily::Lagrange => f.write_str("lagrange"),
            ScanFamily::Euler => f.write_str("euler"),
            ScanFamily::AlphaEta { eta } => write!(f, "alphaeta[eta={eta}]"),
            ScanFamily::Gon { n, rule } => {
                let r = match rule {
                    XiRule::AllCorners => "all-corners",
                    XiRule::PrintedReduction => "printed-reduction",
                };
                write!(f, "gon[n={n};rule={r}]")
            }
        }
    }
}

impl FromStr for ScanFamily {
    type Err = Error;

    /// Accepts the labels written by [`fmt::Display`]. Bare `alphaeta` and
    /// `gon` default to η = 0 and n = 9 with the all-corner rule.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = match s.find('[') {
            Some(i) if s.ends_with(']') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(Error::invalid(format!("malformed family label {s:?}"))),
            None => (s, ""),
        };
        let mut kv = Vec::new();
        for part in args.split([';', ',']).filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value in family label, got {part:?}")))?;
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str, default: f64| -> Result<f64> {
            get(key).map_or(Ok(default), |v| v.parse().map_err(|_| Error::invalid(format!("bad {key} = {v:?}"))))
        };
        match head.to_ascii_lowercase().as_str() {
            "lagrange" => Ok(ScanFamily::Lagrange),
            "euler" => Ok(ScanFamily::Euler),
            "alphaeta" => Ok(ScanFamily::AlphaEta { eta: num("eta", 0.0)? }),
            "gon" => {
                let n = num("n", 9.0)?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(Error::invalid(format!("gon n must be a whole number, got {n}")));
                }
                let rule = match get("rule").unwrap_or("all-corners") {
                    "all-corners" | "all" => XiRule::AllCorners,
                    "printed-reduction" | "printed" => XiRule::PrintedReduction,
                    other => return Err(Error::invalid(format!("unknown xi rule {other:?}"))),
                };
                Ok(ScanFamily::Gon { n: n as usize, rule })
            }
            other => Err(Error::invalid(format!("unknown scan family {other:?}"))),
        }
    }
}

/// A uniformly sampled closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, samples: usize) -> Result<Self> {
        let a = Axis { min, max, samples };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid(format!("axis bounds must be finite, got [{}, {}]", self.min, self.max)));
        }
        if self.min >= self.max {
            return Err(Error::invalid(format!("empty axis range [{}, {}]", self.min, self.max)));
        }
        if self.samples < 2 {
            return Err(Error::invalid(format!("an axis needs at least 2 samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| if i == n { self.max } else { self.min + (self.max - self.min) * i as f64 / n as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub family: ScanFamily,
    pub param: Axis,
    pub e: Axis,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub class_tol: f64,
    /// Region membership from the explicit g-bounds instead of the exact
    /// traces. Gon membership always uses g̃.
    pub use_g: bool,
    pub e0: f64,
    pub overlay_bounds: bool,
    /// `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl ScanRequest {
    pub fn new(family: ScanFamily, param: Axis, e: Axis) -> Self {
        let d = MonodromyOptions::default();
        ScanRequest {
            family,
            param,
            e,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            class_tol: d.class_tol,
            use_g: false,
            e0: E0_DEFAULT,
            overlay_bounds: false,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.param.validate()?;
        self.e.validate()?;
        if self.e.min < 0.0 || self.e.max > E_SCAN_MAX {
            return Err(Error::invalid(format!(
                "e range [{}, {}] must lie in [0, {E_SCAN_MAX}]",
                self.e.min, self.e.max
            )));
        }
        self.family.check_axis(&self.param)?;
        for (name, t) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("class_tol", self.class_tol)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {t}")));
            }
        }
        if !(self.e0 > 0.0 && self.e0 <= E0_MAX) {
            return Err(Error::invalid(format!("e0 = {} outside (0, {E0_MAX}]", self.e0)));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Ok(())
    }
}

/// Class string of a failed grid point.
pub const FAILED: &str = "failed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub family: String,
    pub param: f64,
    pub e: f64,
    /// Block classes joined by `;`, or [`FAILED`].
    pub class: String,
    pub inside_bound: bool,
    pub eigenvalues: Vec<(f64, f64)>,
}

impl ScanRow {
    pub fn failed(&self) -> bool {
        self.class == FAILED
    }

    pub fn classes(&self) -> Result<Vec<StabilityClass>> {
        if self.failed() {
            return Err(Error::InvalidState(format!("grid point ({}, {}) failed", self.param, self.e)));
        }
        self.class.split(';').map(str::parse).collect()
    }

    /// A single class for the whole point: the common class if all blocks
    /// agree, else the first of CS, HH, EH, Degenerate that occurs.
    pub fn overall_class(&self) -> Option<StabilityClass> {
        let cs = self.classes().ok()?;
        let first = *cs.first()?;
        if cs.iter().all(|&c| c == first) {
            return Some(first);
        }
        [StabilityClass::CS, StabilityClass::HH, StabilityClass::EH, StabilityClass::Degenerate]
            .into_iter()
            .find(|c| cs.contains(c))
    }
}

fn scan_point(req: &ScanRequest, label: &str, param: f64, e: f64) -> ScanRow {
    let mut row = ScanRow {
        family: label.to_string(),
        param,
        e,
        class: FAILED.to_string(),
        inside_bound: false,
        eigenvalues: Vec::new(),
    };
    let Ok(ecc) = Eccentricity::new(e) else { return row };
    row.inside_bound = req.family.inside_bound(param, ecc, req.use_g, req.e0).unwrap_or(false);
    let opts = MonodromyOptions { rel_tol: req.rel_tol, abs_tol: req.abs_tol, class_tol: req.class_tol };
    let result = req.family.spec(param).and_then(|s| s.system(ecc)).and_then(|sys| monodromy_with(&sys, opts));
    if let Ok(m) = result {
        let classes: Vec<&str> = m.blocks.iter().map(|b| b.class.map_or(FAILED, |c| c.as_str())).collect();
        if !classes.contains(&FAILED) {
            row.class = classes.join(";");
            row.eigenvalues = m.blocks.iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
        }
    }
    row
}

/// Evaluates every grid point, parameter-major. Points whose integration
/// fails come back with class [`FAILED`].
pub fn scan(req: &ScanRequest) -> Result<Vec<ScanRow>> {
    req.validate()?;
    let label = req.family.to_string();
    let grid: Vec<(f64, f64)> = req
        .param
        .values()
        .into_iter()
        .flat_map(|p| req.e.values().into_iter().map(move |e| (p, e)))
        .collect();
    let run = || grid.par_iter().map(|&(p, e)| scan_point(req, &label, p, e)).collect::<Vec<_>>();
    let rows = match req.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|err| Error::InvalidState(format!("thread pool: {err}")))?
            .install(run),
        None => run(),
    };
    Ok(rows)
}

/// Bound value at one eccentricity: β for Lagrange/Euler, ζ for (α,η),
/// the boundary β = 1/m for the gon (always through g̃; `None` when the
/// region is empty).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub e: f64,
    pub value: Option<f64>,
}

pub fn bound_table(family: ScanFamily, e_axis: Axis, use_g: bool, e0: f64) -> Result<Vec<BoundSample>> {
    e_axis.validate()?;
    if e_axis.min < 0.0 || e_axis.max >= 1.0 {
        return Err(Error::invalid(format!("e range [{}, {}] must lie in [0, 1)", e_axis.min, e_axis.max)));
    }
    e_axis.values().into_iter().map(|e| Ok(BoundSample { e, value: bound_value(family, Eccentricity::new(e)?, use_g, e0)? })).collect()
}

fn bound_value(family: ScanFamily, e: Eccentricity, use_g: bool, e0: f64) -> Result<Option<f64>> {
    Ok(match family {
        ScanFamily::Lagrange => Some(bound_curve(BoundFamily::Lagrange, e, use_g, e0)?),
        ScanFamily::Euler => Some(bound_curve(BoundFamily::Euler, e, use_g, e0)?),
        ScanFamily::AlphaEta { .. } => Some(bound_curve(BoundFamily::AlphaEta, e, use_g, e0)?),
        ScanFamily::Gon { n, rule } => gon_boundary_beta(n, e, e0, rule)?,
    })
}

/// Region boundaries in scan coordinates (x = parameter, y = e) sampled at
/// `e_values`. The g-curves are split at `e0`, where they jump. For (α,η)
/// the two edges α = η ± b and α = 3 − η ± b of `ζ < b` are drawn.
pub fn region_curves(family: ScanFamily, e_values: &[f64], e0: f64) -> Result<Vec<CurveSeries>> {
    let mut es: Vec<f64> = e_values.iter().copied().filter(|e| (0.0..1.0).contains(e)).collect();
    if es.iter().any(|&e| e < e0) && es.iter().any(|&e| e >= e0) {
        es.push(e0);
        es.push(e0 * (1.0 - 1e-12));
    }
    es.sort_by(f64::total_cmp);
    es.dedup();
    let gs: &[bool] = match family {
        ScanFamily::Gon { .. } => &[true],
        _ => &[false, true],
    };
    let mut out = Vec::new();
    for &use_g in gs {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut segs_lo: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut segs_hi: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut flush = |lo: &mut Vec<(f64, f64)>, hi: &mut Vec<(f64, f64)>| {
            if !lo.is_empty() {
                segs_lo.push(std::mem::take(lo));
            }
            if !hi.is_empty() {
                segs_hi.push(std::mem::take(hi));
            }
        };
        for &e in &es {
            if use_g && e >= e0 && lower.last().is_some_and(|&(_, y): &(f64, f64)| y < e0) {
                flush(&mut lower, &mut upper);
            }
            let v = bound_value(family, Eccentricity::new(e)?, use_g, e0)?;
            match (family, v) {
                (ScanFamily::AlphaEta { eta }, Some(b)) => {
                    let lo = (3.0 - eta - b).max(eta - b).max(1.0);
                    let hi = (3.0 - eta + b).min(eta + b);
                    if lo < hi {
                        lower.push((lo, e));
                        upper.push((hi, e));
                    } else {
                        flush(&mut lower, &mut upper);
                    }
                }
                (_, Some(x)) => lower.push((x, e)),
                (_, None) => flush(&mut lower, &mut upper),
            }
        }
        flush(&mut lower, &mut upper);
        segs_lo.extend(segs_hi);
        let name = match (family, use_g) {
            (ScanFamily::AlphaEta { .. }, false) => "f-tilde bound",
            (ScanFamily::AlphaEta { .. }, true) => "g-tilde bound",
            (ScanFamily::Gon { .. }, _) => "g-tilde region",
            (_, false) => "f bound",
            (_, true) => "g bound",
        };
        out.push(CurveSeries { label: name.to_string(), use_g, segments: segs_lo });
    }
    Ok(out)
}
