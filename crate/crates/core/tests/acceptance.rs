//! One PASS/FAIL line per acceptance criterion, with measured values and
//! wall time. Known, explained mismatches print as
//! "FAIL (documented deviation)" and do not fail the run.

use std::time::{Duration, Instant};

use ere_core::cli_scanner::{run_suite, scan, verify_kepler, Axis, CheckStatus, ScanFamily, ScanRequest, ScanRow, Suite, VerifyReport};
use ere_core::configurations::{FamilySpec, XiRule};
use ere_core::hill_index::{assemble_hill, generalized_eigs, index_at, Omega, SturmLiouvilleSpec, DEFAULT_NULL_TOL};
use ere_core::ode_engine::{block_diag, monodromy_with, MonodromyOptions};
use ere_core::symplectic_core::{symplectic_defect, StabilityClass};
use ere_core::Eccentricity;
use nalgebra::DMatrix;

#[derive(PartialEq)]
enum Verdict {
    Pass,
    Fail,
    Deviation,
}

struct Outcome {
    verdict: Verdict,
    summary: String,
    details: Vec<String>,
}

fn from_report(report: &VerifyReport, keep: impl Fn(&str) -> bool) -> Outcome {
    let checks: Vec<_> = report.checks.iter().filter(|c| keep(&c.name) && c.status != CheckStatus::Info).collect();
    let fails = checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
    let devs = checks.iter().filter(|c| c.status == CheckStatus::DocumentedDeviation).count();
    let verdict = if fails > 0 {
        Verdict::Fail
    } else if devs > 0 {
        Verdict::Deviation
    } else {
        Verdict::Pass
    };
    let details = checks.iter().filter(|c| c.status != CheckStatus::Pass).map(|c| c.to_string()).collect();
    Outcome { verdict, summary: format!("{} checks, {fails} failed, {devs} documented deviations", checks.len()), details }
}

fn ecc(e: f64) -> Eccentricity {
    Eccentricity::new(e).unwrap()
}

fn criterion1() -> Outcome {
    let r = verify_kepler(&[0.0, 0.3, 0.6, 0.9], 1e-8);
    let worst = r.checks.iter().map(|c| c.measured).fold(0.0, f64::max);
    let mut o = from_report(&r, |_| true);
    o.summary = format!("max deviation {worst:.2e} (threshold 1e-8); {}", o.summary);
    o
}

fn criterion2() -> Outcome {
    from_report(&run_suite(Suite::Indices), |_| true)
}

fn criterion3() -> Outcome {
    let r = run_suite(Suite::Traces);
    let worst = r
        .checks
        .iter()
        .filter(|c| c.name.contains("vs direct-G") && !c.name.contains("verbatim"))
        .map(|c| ((c.measured - c.expected) / c.expected).abs())
        .fold(0.0, f64::max);
    let mut o = from_report(&r, |n| n.contains("vs direct-G") && !n.contains("verbatim"));
    o.summary = format!("worst relative disagreement {worst:.2e} (threshold 1e-5); {}", o.summary);
    o.details.extend(r.checks.iter().filter(|c| c.name.contains("verbatim")).map(|c| format!("note: {c}")));
    o
}

fn criterion4() -> Outcome {
    let traces = run_suite(Suite::Traces);
    let gon = run_suite(Suite::Gon9);
    let mut report = VerifyReport::default();
    report.checks.extend(traces.checks.into_iter().filter(|c| c.comparison == ere_core::cli_scanner::Comparison::Abs));
    report.checks.extend(gon.checks.into_iter().filter(|c| !c.name.contains("monodromy")));
    from_report(&report, |_| true)
}

fn criterion5() -> Outcome {
    let r = run_suite(Suite::Traces);
    from_report(&r, |n| n.starts_with("min (") || n.starts_with("rho bracket") || n.starts_with("bound evaluation"))
}

/// Rows inside the region must have the family's class. Degenerate is
/// tolerated within one grid cell of the boundary (a neighbour outside).
fn consistency(rows: &[ScanRow], family: ScanFamily, samples: (usize, usize)) -> (usize, Vec<String>) {
    let expected = family.region_class().expect("family with a class region");
    let idx = |i: usize, j: usize| i * samples.1 + j;
    let mut inside = 0;
    let mut bad = Vec::new();
    for i in 0..samples.0 {
        for j in 0..samples.1 {
            let r = &rows[idx(i, j)];
            if !r.inside_bound {
                continue;
            }
            inside += 1;
            let classes = r.classes().unwrap_or_default();
            if !classes.is_empty() && classes.iter().all(|&c| c == expected) {
                continue;
            }
            let near_edge = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().any(|&(di, dj)| {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                a >= 0 && b >= 0 && (a as usize) < samples.0 && (b as usize) < samples.1 && !rows[idx(a as usize, b as usize)].inside_bound
            });
            let only_degenerate = !classes.is_empty() && classes.iter().all(|&c| c == expected || c == StabilityClass::Degenerate);
            if !(near_edge && only_degenerate) {
                bad.push(format!("{} param={:.6} e={:.4}: {}", r.family, r.param, r.e, r.class));
            }
        }
    }
    (inside, bad)
}

fn criterion6() -> Outcome {
    let mut details = Vec::new();
    let mut summary = Vec::new();
    let mut ok = true;
    let grids = [
        (ScanFamily::Lagrange, Axis::new(0.0, 1.0, 20).unwrap()),
        (ScanFamily::Euler, Axis::new(0.0, 0.06, 20).unwrap()),
        (ScanFamily::Gon { n: 9, rule: XiRule::AllCorners }, Axis::new(5e-5, 1e-3, 20).unwrap()),
    ];
    for (family, param) in grids {
        let mut req = ScanRequest::new(family, param, Axis::new(0.0, 0.9, 20).unwrap());
        req.class_tol = 1e-6;
        let rows = match scan(&req) {
            Ok(r) => r,
            Err(e) => {
                ok = false;
                details.push(format!("{family}: scan error {e}"));
                continue;
            }
        };
        let (inside, bad) = consistency(&rows, family, (20, 20));
        ok &= bad.is_empty() && inside > 0;
        let mut line = format!("{family}: {inside} inside, {} inconsistent", bad.len());
        if let ScanFamily::Gon { n, .. } = family {
            let opts = MonodromyOptions { class_tol: 1e-6, ..MonodromyOptions::default() };
            let unstable = rows
                .iter()
                .filter(|r| r.inside_bound)
                .filter(|r| {
                    let m = FamilySpec::gon(n, 1.0 / r.param).and_then(|f| f.system(ecc(r.e))).and_then(|s| monodromy_with(&s, opts));
                    !m.is_ok_and(|m| m.all_linearly_stable())
                })
                .count();
            ok &= unstable == 0;
            line.push_str(&format!(", {unstable} not linearly stable"));
        }
        summary.push(line);
        details.extend(bad.into_iter().take(5));
    }
    Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, summary: summary.join("; "), details }
}

fn criterion7() -> Outcome {
    let mut details = Vec::new();
    let opts = MonodromyOptions::default();
    // Symplecticity and quadruple symmetry of monodromies.
    let mut worst_defect: f64 = 0.0;
    let mut worst_pairing: f64 = 0.0;
    let specs = [
        FamilySpec::lagrange(0.3).unwrap(),
        FamilySpec::euler(0.5).unwrap(),
        FamilySpec::alpha_eta(1.2, 0.4).unwrap(),
        FamilySpec::gon(9, 500.0).unwrap(),
    ];
    for spec in specs {
        for ev in [0.0, 0.3, 0.6] {
            let m = monodromy_with(&spec.system(ecc(ev)).unwrap(), opts).unwrap();
            let mut off = 0;
            for b in &m.blocks {
                let block = m.matrix.view((off, off), (b.dim, b.dim)).clone_owned();
                off += b.dim;
                worst_defect = worst_defect.max(symplectic_defect(&block).unwrap() / block.amax().max(1.0).powi(2));
                for &(re, im) in &b.eigenvalues {
                    let z = num_complex::Complex64::new(re, im);
                    for w in [z.conj(), z.inv(), z.inv().conj()] {
                        let d = b.eigenvalues.iter().map(|&(r2, i2)| (num_complex::Complex64::new(r2, i2) - w).norm()).fold(f64::INFINITY, f64::min);
                        worst_pairing = worst_pairing.max(d / z.norm().max(1.0 / z.norm()).max(1.0));
                    }
                }
            }
        }
    }
    let sym_ok = worst_defect <= 100.0 * opts.rel_tol.max(opts.abs_tol);
    let pair_ok = worst_pairing <= 1e-6;
    // Hermiticity and additivity of Hill matrices.
    let mut herm: f64 = 0.0;
    let blocks = [
        DMatrix::from_diagonal(&nalgebra::dvector![3.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.1, 2.5]),
        DMatrix::from_diagonal(&nalgebra::dvector![4.5, -1.5]),
    ];
    let mut additive = true;
    for ev in [0.0, 0.4, 0.8] {
        for omega in Omega::BOTH {
            let mut sum = (0, 0);
            for b in &blocks {
                let spec = SturmLiouvilleSpec::new(ecc(ev), b.clone()).unwrap();
                herm = herm.max(assemble_hill(&spec, omega, 16).unwrap().hermitian_defect());
                let r = index_at(&spec, omega, 32, DEFAULT_NULL_TOL).unwrap();
                sum = (sum.0 + r.morse, sum.1 + r.nullity);
            }
            let whole = SturmLiouvilleSpec::new(ecc(ev), block_diag(&blocks)).unwrap();
            additive &= index_at(&whole, omega, 32, DEFAULT_NULL_TOL).unwrap().counts() == sum;
        }
    }
    // Generalized eigenvalues with a positive base are real.
    let mut worst_im: f64 = 0.0;
    for ev in [0.0, 0.5] {
        let base = SturmLiouvilleSpec::new(ecc(ev), DMatrix::identity(2, 2) * 1.5).unwrap();
        for omega in Omega::BOTH {
            for k in generalized_eigs(&base, &DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]), omega, 32).unwrap() {
                worst_im = worst_im.max(k.im.abs());
            }
        }
    }
    let ok = sym_ok && pair_ok && herm <= 1e-12 && additive && worst_im <= 1e-7;
    if !ok {
        details.push(format!("symplectic {sym_ok}, pairing {pair_ok}, hermitian {herm:.1e}, additive {additive}, imag {worst_im:.1e}"));
    }
    Outcome {
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        summary: format!(
            "symplectic defect {worst_defect:.1e} (≤ {:.0e}), pairing {worst_pairing:.1e}, Hill hermitian defect {herm:.1e}, additivity {additive}, max |Im κ| {worst_im:.1e}",
            100.0 * opts.rel_tol
        ),
        details,
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 Kepler closed form vs integrator", Duration::from_secs(5), criterion1),
        ("2 Kepler Maslov-type indices", Duration::from_secs(30), criterion2),
        ("3 three-way trace agreement", Duration::from_secs(60), criterion3),
        ("4 reference boundary values", Duration::from_secs(60), criterion4),
        ("5 domination and rho brackets", Duration::from_secs(60), criterion5),
        ("6 region/monodromy consistency", Duration::from_secs(600), criterion6),
        ("7 property suites", Duration::from_secs(120), criterion7),
    ];
    let mut hard_fail = false;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if took > budget && o.verdict != Verdict::Fail {
            o.verdict = Verdict::Fail;
            o.details.push(format!("over the {budget:?} budget"));
        }
        let tag = match o.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Deviation => "FAIL (documented deviation)",
        };
        hard_fail |= o.verdict == Verdict::Fail;
        println!("{tag}: criterion {name}: {} [{:.2} s]", o.summary, took.as_secs_f64());
        for d in o.details {
            println!("    {d}");
        }
    }
    if hard_fail {
        std::process::exit(1);
    }
}
