//! Explicit Runge–Kutta 8(5,3) with step-size control and order-7 dense output.

use super::tableau::*;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Dop853Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub dense: bool,
}

impl Default for Dop853Options {
    fn default() -> Self {
        Dop853Options {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_steps: 10_000_000,
            h_init: None,
            h_max: None,
            dense: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Sum of the accepted local error estimates (max-norm, absolute).
    pub error_estimate: f64,
}

impl IntegratorStats {
    pub(crate) fn merge(&mut self, other: &IntegratorStats) {
        self.steps += other.steps;
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
        self.error_estimate += other.error_estimate;
    }
}

#[derive(Debug, Clone)]
struct Segment {
    t0: f64,
    h: f64,
    cont: [Vec<f64>; 8],
}

/// Piecewise polynomial interpolant over the accepted steps.
#[derive(Debug, Clone)]
pub struct DenseOutput {
    dim: usize,
    segments: Vec<Segment>,
}

impl DenseOutput {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_start(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.t0)
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.t0 + s.h)
    }

    /// State at `t`; clamped to the integration interval.
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.dim);
        let Some(last) = self.segments.last() else {
            return;
        };
        let forward = last.h > 0.0;
        let idx = self.segments.partition_point(|s| {
            let end = s.t0 + s.h;
            if forward {
                end < t
            } else {
                end > t
            }
        });
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        let s = ((t - seg.t0) / seg.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let c = &seg.cont;
        for i in 0..self.dim {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub y: Vec<f64>,
    pub stats: IntegratorStats,
    pub dense: Option<DenseOutput>,
}

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..out.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

fn initial_step<F>(f: &mut F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, opts: &Dop853Options, hmax: f64) -> (f64, usize)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sk = |i: usize| opts.abs_tol + opts.rel_tol * y0[i].abs();
    let dnf = (0..n).map(|i| (f0[i] / sk(i)).powi(2)).sum::<f64>();
    let dny = (0..n).map(|i| (y0[i] / sk(i)).powi(2)).sum::<f64>();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(hmax) * dir;
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + h * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h, &y1, &mut f1);
    let der2 = ((0..n).map(|i| ((f1[i] - f0[i]) / sk(i)).powi(2)).sum::<f64>()).sqrt() / h.abs();
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h.abs() * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    ((100.0 * h.abs()).min(h1).min(hmax) * dir, 1)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y0: &[f64], opts: &Dop853Options) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    if !(opts.rel_tol > 0.0 && opts.abs_tol >= 0.0) {
        return Err(Error::invalid("tolerances must be positive"));
    }
    let mut stats = IntegratorStats::default();
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(Solution {
            y,
            stats,
            dense: opts.dense.then(|| DenseOutput { dim: n, segments: Vec::new() }),
        });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let hmax = opts.h_max.unwrap_or(span).min(span);

    const SAFE: f64 = 0.9;
    const FACC1: f64 = 1.0 / 0.333;
    const FACC2: f64 = 1.0 / 6.0;
    const EXPO1: f64 = 1.0 / 8.0;

    let mut k1 = vec![0.0; n];
    let [mut k2, mut k3, mut k4, mut k5, mut k6, mut k7, mut k8, mut k9, mut k10] =
        std::array::from_fn(|_| vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    f(t0, &y, &mut k1);
    stats.evaluations += 1;
    let mut h = match opts.h_init {
        Some(h) => h.abs().min(hmax) * dir,
        None => {
            let (h, ev) = initial_step(&mut f, t0, &y, &k1, dir, opts, hmax);
            stats.evaluations += ev;
            h
        }
    };
    let mut t = t0;
    let mut last_rejected = false;
    let mut segments = Vec::new();

    loop {
        if stats.steps >= opts.max_steps {
            return Err(Error::StepBudget { theta: t, max_steps: opts.max_steps });
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { theta: t });
        }
        let last = (t + 1.01 * h - t1) * dir >= 0.0;
        if last {
            h = t1 - t;
        }
        stats.steps += 1;

        axpy(&mut ytmp, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &ytmp, &mut k2);
        axpy(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &ytmp, &mut k3);
        axpy(&mut ytmp, &y, h, &[(A41, &k1), (A43, &k3)]);
        f(t + C4 * h, &ytmp, &mut k4);
        axpy(&mut ytmp, &y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &ytmp, &mut k5);
        axpy(&mut ytmp, &y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]);
        f(t + C6 * h, &ytmp, &mut k6);
        axpy(&mut ytmp, &y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]);
        f(t + C7 * h, &ytmp, &mut k7);
        axpy(&mut ytmp, &y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]);
        f(t + C8 * h, &ytmp, &mut k8);
        axpy(
            &mut ytmp,
            &y,
            h,
            &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)],
        );
        f(t + C9 * h, &ytmp, &mut k9);
        axpy(
            &mut ytmp,
            &y,
            h,
            &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
        );
        f(t + C10 * h, &ytmp, &mut k10);
        axpy(
            &mut ytmp,
            &y,
            h,
            &[
                (A111, &k1),
                (A114, &k4),
                (A115, &k5),
                (A116, &k6),
                (A117, &k7),
                (A118, &k8),
                (A119, &k9),
                (A1110, &k10),
            ],
        );
        f(t + C11 * h, &ytmp, &mut k2);
        let t_new = t + h;
        axpy(
            &mut ytmp,
            &y,
            h,
            &[
                (A121, &k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k2),
            ],
        );
        f(t_new, &ytmp, &mut k3);
        stats.evaluations += 11;

        // k4 <- increment, k5 <- new state
        for i in 0..n {
            k4[i] = B1 * k1[i]
                + B6 * k6[i]
                + B7 * k7[i]
                + B8 * k8[i]
                + B9 * k9[i]
                + B10 * k10[i]
                + B11 * k2[i]
                + B12 * k3[i];
            k5[i] = y[i] + h * k4[i];
        }

        let mut err = 0.0;
        let mut err2 = 0.0;
        let mut local_abs: f64 = 0.0;
        for i in 0..n {
            let sk = opts.abs_tol + opts.rel_tol * y[i].abs().max(k5[i].abs());
            let e2 = k4[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k3[i];
            let e1 = ER1 * k1[i]
                + ER6 * k6[i]
                + ER7 * k7[i]
                + ER8 * k8[i]
                + ER9 * k9[i]
                + ER10 * k10[i]
                + ER11 * k2[i]
                + ER12 * k3[i];
            err2 += (e2 / sk).powi(2);
            err += (e1 / sk).powi(2);
            let denom_i = (e1 * e1 + 0.01 * e2 * e2).sqrt();
            if denom_i > 0.0 {
                local_abs = local_abs.max(h.abs() * e1 * e1 / denom_i);
            }
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();

        let fac11 = err.powf(EXPO1);
        let fac = FACC2.max(FACC1.min(fac11 / SAFE));
        let mut h_new = h / fac;

        if err <= 1.0 {
            stats.accepted += 1;
            stats.error_estimate += local_abs;
            // k4 <- f(t_new, y_new)
            let kinc = std::mem::take(&mut k4);
            let mut fnew = vec![0.0; n];
            f(t_new, &k5, &mut fnew);
            stats.evaluations += 1;

            if opts.dense {
                let mut cont: [Vec<f64>; 8] = std::array::from_fn(|_| vec![0.0; n]);
                for i in 0..n {
                    let ydiff = k5[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * fnew[i] - bspl;
                    cont[4][i] = D41 * k1[i]
                        + D46 * k6[i]
                        + D47 * k7[i]
                        + D48 * k8[i]
                        + D49 * k9[i]
                        + D410 * k10[i]
                        + D411 * k2[i]
                        + D412 * k3[i];
                    cont[5][i] = D51 * k1[i]
                        + D56 * k6[i]
                        + D57 * k7[i]
                        + D58 * k8[i]
                        + D59 * k9[i]
                        + D510 * k10[i]
                        + D511 * k2[i]
                        + D512 * k3[i];
                    cont[6][i] = D61 * k1[i]
                        + D66 * k6[i]
                        + D67 * k7[i]
                        + D68 * k8[i]
                        + D69 * k9[i]
                        + D610 * k10[i]
                        + D611 * k2[i]
                        + D612 * k3[i];
                    cont[7][i] = D71 * k1[i]
                        + D76 * k6[i]
                        + D77 * k7[i]
                        + D78 * k8[i]
                        + D79 * k9[i]
                        + D710 * k10[i]
                        + D711 * k2[i]
                        + D712 * k3[i];
                }
                let mut s14 = vec![0.0; n];
                let mut s15 = vec![0.0; n];
                let mut s16 = vec![0.0; n];
                axpy(
                    &mut ytmp,
                    &y,
                    h,
                    &[
                        (A141, &k1),
                        (A147, &k7),
                        (A148, &k8),
                        (A149, &k9),
                        (A1410, &k10),
                        (A1411, &k2),
                        (A1412, &k3),
                        (A1413, &fnew),
                    ],
                );
                f(t + C14 * h, &ytmp, &mut s14);
                axpy(
                    &mut ytmp,
                    &y,
                    h,
                    &[
                        (A151, &k1),
                        (A156, &k6),
                        (A157, &k7),
                        (A158, &k8),
                        (A1511, &k2),
                        (A1512, &k3),
                        (A1513, &fnew),
                        (A1514, &s14),
                    ],
                );
                f(t + C15 * h, &ytmp, &mut s15);
                axpy(
                    &mut ytmp,
                    &y,
                    h,
                    &[
                        (A161, &k1),
                        (A166, &k6),
                        (A167, &k7),
                        (A168, &k8),
                        (A169, &k9),
                        (A1613, &fnew),
                        (A1614, &s14),
                        (A1615, &s15),
                    ],
                );
                f(t + C16 * h, &ytmp, &mut s16);
                stats.evaluations += 3;
                for i in 0..n {
                    cont[4][i] = h * (cont[4][i] + D413 * fnew[i] + D414 * s14[i] + D415 * s15[i] + D416 * s16[i]);
                    cont[5][i] = h * (cont[5][i] + D513 * fnew[i] + D514 * s14[i] + D515 * s15[i] + D516 * s16[i]);
                    cont[6][i] = h * (cont[6][i] + D613 * fnew[i] + D614 * s14[i] + D615 * s15[i] + D616 * s16[i]);
                    cont[7][i] = h * (cont[7][i] + D713 * fnew[i] + D714 * s14[i] + D715 * s15[i] + D716 * s16[i]);
                }
                segments.push(Segment { t0: t, h, cont });
            }

            k4 = kinc;
            k1.copy_from_slice(&fnew);
            std::mem::swap(&mut y, &mut k5);
            t = t_new;
            if last {
                break;
            }
            if h_new.abs() > hmax {
                h_new = hmax * dir;
            }
            if last_rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            last_rejected = false;
        } else {
            h_new = h / FACC1.min(fac11 / SAFE);
            last_rejected = true;
            stats.rejected += 1;
        }
        h = h_new;
    }

    Ok(Solution {
        y,
        stats,
        dense: opts.dense.then_some(DenseOutput { dim: n, segments }),
    })
}
