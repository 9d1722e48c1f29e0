use std::f64::consts::PI;

use ere_core::configurations::XiRule;
use ere_core::kepler_core::{gamma_kep, rho_integrals, Eccentricity};
use ere_core::trace_engine::*;
use nalgebra::Matrix4;

fn ecc(e: f64) -> Eccentricity {
    Eccentricity::new(e).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn three_way_agreement() {
    for &ev in &[0.1, 0.3, 0.5, 0.7] {
        let e = ecc(ev);
        for (label, closed) in [
            (PerturbationLabel::DL, vec![(Half::Plus, f_l_plus(e).unwrap()), (Half::Minus, f_l_minus(e).unwrap())]),
            (PerturbationLabel::DTilde, vec![(Half::Minus, f_tilde(e).unwrap())]),
        ] {
            for (half, c) in closed {
                let q = trace_value(label, e, half, TraceMethod::HalfTraceQuadrature).unwrap();
                let d = trace_value(label, e, half, TraceMethod::DirectG).unwrap();
                assert!(rel(q, d) < 1e-8, "{label:?} {half:?} e={ev}: half {q} direct {d}");
                assert!(rel(c, d) < 1e-5, "{label:?} {half:?} e={ev}: closed {c} direct {d}");
            }
        }
    }
}

#[test]
fn tilde_closed_form_is_the_larger_half() {
    for &ev in &[0.1, 0.4, 0.7] {
        let e = ecc(ev);
        let d = PerturbationD::d_tilde();
        let m = f_half(&d, e, Half::Plus).unwrap().max(f_half(&d, e, Half::Minus).unwrap());
        assert!(rel(m, f_tilde(e).unwrap()) < 1e-6, "e={ev}");
    }
}

#[test]
fn direct_trace_matches_closed_form_at_0_2() {
    let e = ecc(0.2);
    let b = BoundaryData::new(e, Half::Plus).unwrap();
    let (_, tr2) = trace_f_and_f2(&PerturbationD::d_l(), e, &b).unwrap();
    assert!(rel(tr2, f_l_plus(e).unwrap()) < 1e-6);
}

#[test]
fn minus_half_dominates_plus() {
    let d = PerturbationD::d_l();
    for &ev in &[0.05, 0.2, 0.4, 0.6, 0.8] {
        let e = ecc(ev);
        assert!(f_half(&d, e, Half::Minus).unwrap() > f_half(&d, e, Half::Plus).unwrap(), "e={ev}");
    }
}

#[test]
fn verbatim_minus_range_disagrees_with_direct_trace() {
    let e = ecc(0.1);
    let d = PerturbationD::d_l();
    let verbatim = f_half_minus_verbatim(&d, e).unwrap();
    let direct = trace_value(PerturbationLabel::DL, e, Half::Minus, TraceMethod::DirectG).unwrap();
    assert!(rel(verbatim, direct) > 0.5);
}

#[test]
fn euler_and_lagrange_perturbations_share_traces() {
    let e = ecc(0.3);
    let b = BoundaryData::new(e, Half::Minus).unwrap();
    let l = trace_f_and_f2(&PerturbationD::d_l(), e, &b).unwrap();
    let r = trace_f_and_f2(&PerturbationD::d_e(), e, &b).unwrap();
    assert!((l.0 + r.0).abs() < 1e-9 * l.0.abs().max(1.0));
    assert!(rel(l.1, r.1) < 1e-10);
}

/// Cumulative-trapezoid oracle for M₂ on a uniform grid with Richardson
/// extrapolation between n and 2n points.
fn m2_trapezoid(d: &PerturbationD, e: Eccentricity, n: usize) -> Matrix4<f64> {
    let h = PI / n as f64;
    let x: Vec<Matrix4<f64>> = (0..=n).map(|i| d.j_hat(e, i as f64 * h)).collect();
    let mut k = Matrix4::zeros();
    let mut prev = x[0] * k;
    let mut acc = Matrix4::zeros();
    for i in 1..=n {
        k += (x[i - 1] + x[i]) * (0.5 * h);
        let cur = x[i] * k;
        acc += (prev + cur) * (0.5 * h);
        prev = cur;
    }
    acc
}

#[test]
fn m2_matches_riemann_oracle() {
    let e = ecc(0.2);
    let d = PerturbationD::d_l();
    let m2 = m_iterated(&d, e, 2, PI).unwrap();
    let coarse = m2_trapezoid(&d, e, 2048);
    let fine = m2_trapezoid(&d, e, 4096);
    let oracle = fine + (fine - coarse) / 3.0;
    assert!((m2 - oracle).amax() < 1e-6, "{}", (m2 - oracle).amax());
    assert!((m2 - fine).amax() < 1e-4);
}

#[test]
fn trace_scales_quadratically() {
    let e = ecc(0.35);
    let b = BoundaryData::new(e, Half::Plus).unwrap();
    let a = trace_f_and_f2(&PerturbationD::d_tilde(), e, &b).unwrap().1;
    let s = trace_f_and_f2(&PerturbationD::d_tilde().scaled(0.3), e, &b).unwrap().1;
    assert!(rel(s, 0.09 * a) < 1e-9);
}

#[test]
fn closed_form_reference_values() {
    let z = Eccentricity::ZERO;
    let lag0 = bound_curve(BoundFamily::Lagrange, z, true, E0_DEFAULT).unwrap();
    assert!((lag0 - 0.7469).abs() < 5e-4, "{lag0}");
    let eul0 = bound_curve(BoundFamily::Euler, z, true, E0_DEFAULT).unwrap();
    assert!((eul0 - 0.0636).abs() < 5e-4, "{eul0}");
    let ft0 = bound_curve(BoundFamily::AlphaEta, z, false, E0_DEFAULT).unwrap();
    assert!((ft0 - 0.0523).abs() < 5e-4, "{ft0}");
    let e = ecc(0.1);
    let check = 1.0 / g_tilde_check(e).sqrt();
    let hat = 1.0 / g_tilde_hat(e).unwrap().sqrt();
    assert!((check - 0.0189).abs() < 5e-4 && (hat - 0.0187).abs() < 5e-4, "{check} {hat}");
}

#[test]
fn euler_bound_is_half_inverse_root_of_lagrange_trace() {
    for &ev in &[0.0, 0.2, 0.6] {
        let e = ecc(ev);
        let f = closed_form_bound(BoundKind::FLMax, e, E0_DEFAULT).unwrap().value;
        let eu = bound_curve(BoundFamily::Euler, e, false, E0_DEFAULT).unwrap();
        assert!((eu - 0.5 / f.sqrt()).abs() < 1e-15);
        assert!(rel(f, f_l_minus(e).unwrap()) < 1e-15);
    }
}

fn grid(n: usize, top: f64) -> impl Iterator<Item = Eccentricity> {
    (0..n).map(move |i| ecc(top * i as f64 / (n - 1) as f64))
}

#[test]
fn g_bounds_dominate_f_bounds() {
    for e in grid(50, 0.95) {
        let f_p = f_l_plus(e).unwrap();
        let f_m = f_l_minus(e).unwrap();
        let f_t = f_tilde(e).unwrap();
        assert!(g_l_plus(e) >= f_p, "e={}", e.get());
        assert!(g_l_minus_check(e) >= f_m, "e={}", e.get());
        assert!(g_tilde_check(e) >= f_t, "e={}", e.get());
        if e.get() > 0.0 {
            assert!(g_l_minus_hat(e).unwrap() >= f_m);
            assert!(g_tilde_hat(e).unwrap() >= f_t);
        }
    }
}

#[test]
fn every_bound_is_positive() {
    for e in grid(34, 0.99) {
        for kind in BoundKind::ALL {
            let v = closed_form_bound(kind, e, E0_DEFAULT).unwrap().value;
            assert!(v > 0.0 && v.is_finite(), "{kind:?} e={}: {v}", e.get());
        }
    }
}

#[test]
fn rho_brackets_contain_quadrature() {
    for e in grid(40, 0.95) {
        let r = rho_integrals(e).unwrap();
        assert!(rho1_bracket(e).contains(r.rho1), "rho1 e={}", e.get());
        assert!(rho3_bracket(e).contains(r.rho3), "rho3 e={}", e.get());
        for e0 in [0.05, E0_DEFAULT, 0.5, E0_MAX] {
            assert!(rho2_bracket(e, e0).contains(r.rho2), "rho2 e={} e0={e0}", e.get());
        }
        for i in 0..=8 {
            let t = PI * i as f64 / 8.0;
            let b = rho0_bracket(e, t);
            let v = ere_core::kepler_core::rho0(e, t);
            assert!(b.lower <= v + 1e-12 && v <= b.upper + 1e-12, "rho0 e={} t={t}", e.get());
        }
    }
}

#[test]
fn rho_brackets_at_half() {
    let e = ecc(0.5);
    let r = rho_integrals(e).unwrap();
    assert!(rho1_bracket(e).contains(r.rho1));
    assert!(rho2_bracket(e, E0_DEFAULT).contains(r.rho2));
    assert!(rho3_bracket(e).contains(r.rho3));
}

#[test]
fn gon_region_examples() {
    let e0 = E0_DEFAULT;
    let q = ere_core::configurations::q_max(9);
    assert!(!gon_region_member(9, 2.0 * q, Eccentricity::ZERO, e0).unwrap());
    assert!(!gon_region_member(9, 2.0 * q - 1.0, Eccentricity::ZERO, e0).unwrap());
    let b0 = gon_boundary_beta(9, Eccentricity::ZERO, e0, XiRule::PrintedReduction).unwrap().unwrap();
    assert!((b0 - 0.00445).abs() < 5e-5, "{b0}");
    let below = gon_boundary_beta(9, ecc(0.1 - 1e-9), e0, XiRule::PrintedReduction).unwrap().unwrap();
    let above = gon_boundary_beta(9, ecc(0.1), e0, XiRule::PrintedReduction).unwrap().unwrap();
    assert!((below - 0.00422).abs() < 5e-5, "{below}");
    assert!((above - 0.00418).abs() < 5e-5, "{above}");
    // Inside just below the boundary β, outside just above.
    assert!(gon_region_member_with(9, 1.0 / (0.99 * b0), Eccentricity::ZERO, e0, XiRule::PrintedReduction).unwrap());
    assert!(!gon_region_member_with(9, 1.0 / (1.01 * b0), Eccentricity::ZERO, e0, XiRule::PrintedReduction).unwrap());
    // The all-corner region is strictly smaller.
    let all = gon_boundary_beta(9, Eccentricity::ZERO, e0, XiRule::AllCorners).unwrap().unwrap();
    assert!(all < b0);
}

#[test]
fn kepler_frame_is_available_to_custom_perturbations() {
    // A custom D built from γ itself stays symmetric.
    let d = PerturbationD::custom(|e, t| {
        let g = gamma_kep(Eccentricity::new(e).unwrap(), t).matrix;
        g.transpose() * g * 1e-3
    });
    d.check_symmetric(ecc(0.2), 16).unwrap();
    let asym = PerturbationD::custom(|_, _| {
        let mut m = Matrix4::zeros();
        m[(0, 1)] = 1.0;
        m
    });
    assert!(asym.check_symmetric(ecc(0.2), 4).is_err());
}
