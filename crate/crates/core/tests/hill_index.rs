use std::time::Instant;

use ere_core::configurations::FamilySpec;
use ere_core::hill_index::*;
use ere_core::kepler_core::Eccentricity;
use ere_core::ode_engine::block_diag;
use ere_core::trace_engine::{f_l_minus, f_l_plus};
use nalgebra::DMatrix;

fn ecc(e: f64) -> Eccentricity {
    Eccentricity::new(e).unwrap()
}

#[test]
fn kepler_indices() {
    let start = Instant::now();
    for &e in &[0.0, 0.5, 0.9] {
        let spec = SturmLiouvilleSpec::kepler(ecc(e));
        let one = morse_index(&spec, Omega::One, 128, DEFAULT_NULL_TOL).unwrap();
        let minus = morse_index(&spec, Omega::MinusOne, 128, DEFAULT_NULL_TOL).unwrap();
        assert_eq!(one.counts(), (0, 3), "e={e}: {one:?}");
        assert_eq!(minus.counts(), (2, 0), "e={e}: {minus:?}");
    }
    eprintln!("kepler indices: {:?}", start.elapsed());
}

#[test]
fn lagrange_nine_is_positive() {
    for &e in &[0.0, 0.5] {
        let spec = FamilySpec::lagrange(9.0).unwrap().system(ecc(e)).unwrap();
        for omega in Omega::BOTH {
            let r = system_index(&spec, omega, 64, DEFAULT_NULL_TOL).unwrap();
            assert_eq!(r.morse, 0, "e={e} omega={omega}");
        }
    }
}

#[test]
fn nine_gon_with_heavy_centre_is_positive() {
    let sys = FamilySpec::gon(9, 100.0).unwrap().system(Eccentricity::ZERO).unwrap();
    let r = system_index(&sys, Omega::One, 64, DEFAULT_NULL_TOL).unwrap();
    assert_eq!(r.morse, 0, "{r:?}");
}

#[test]
fn hill_matrices_are_hermitian() {
    for &e in &[0.0, 0.4, 0.9] {
        for r in [DMatrix::from_diagonal(&nalgebra::dvector![3.0, 0.0]), DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, -2.0])] {
            let spec = SturmLiouvilleSpec::new(ecc(e), r).unwrap();
            for omega in Omega::BOTH {
                let h = assemble_hill(&spec, omega, 16).unwrap();
                assert!(h.hermitian_defect() <= 1e-12);
                assert_eq!(h.dim(), 2 * 33);
            }
        }
    }
}

#[test]
fn index_is_additive_over_blocks() {
    let e = ecc(0.3);
    let blocks = vec![
        DMatrix::from_diagonal(&nalgebra::dvector![3.0, 0.0]),
        DMatrix::from_diagonal(&nalgebra::dvector![4.5, -1.5]),
        DMatrix::from_row_slice(2, 2, &[0.2, 0.1, 0.1, 2.5]),
    ];
    for omega in Omega::BOTH {
        let mut sum = (0, 0);
        for b in &blocks {
            let r = index_at(&SturmLiouvilleSpec::new(e, b.clone()).unwrap(), omega, 32, DEFAULT_NULL_TOL).unwrap();
            sum.0 += r.morse;
            sum.1 += r.nullity;
        }
        let whole = SturmLiouvilleSpec::new(e, block_diag(&blocks)).unwrap();
        let r = index_at(&whole, omega, 32, DEFAULT_NULL_TOL).unwrap();
        assert_eq!(r.counts(), sum, "omega={omega}");
    }
}

#[test]
fn generalized_eigenvalues_are_real_for_positive_base() {
    let n_tilde = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]);
    for &e in &[0.0, 0.5] {
        let base = SturmLiouvilleSpec::new(ecc(e), DMatrix::identity(2, 2) * 1.5).unwrap();
        for omega in Omega::BOTH {
            let kappa = generalized_eigs(&base, &n_tilde, omega, 32).unwrap();
            assert!(!kappa.is_empty());
            let worst = kappa.iter().map(|k| k.im.abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-7, "e={e} omega={omega}: {worst}");
        }
    }
}

#[test]
fn inverse_square_sum_approaches_trace() {
    // On ω = −1 the ℤ₂ halves together carry the whole trace.
    let e = ecc(0.3);
    let base = SturmLiouvilleSpec::kepler(e);
    let w = DMatrix::from_diagonal(&nalgebra::dvector![0.5, -0.5]);
    let target = f_l_plus(e).unwrap() + f_l_minus(e).unwrap();
    let mut prev = 0.0;
    for k in [16, 64, 256] {
        let s = inverse_square_sum(&generalized_eigs(&base, &w, Omega::MinusOne, k).unwrap());
        assert!(s.im.abs() < 1e-8 * s.re);
        assert!(s.re <= target * (1.0 + 1e-9) && s.re >= prev * (1.0 - 1e-12), "K={k}: {} vs {target}", s.re);
        prev = s.re;
    }
    assert!((prev - target).abs() < 0.05 * target);
}

#[test]
fn smallest_kappa_consistent_with_trace_bound() {
    // 1/κ_min² is one term of Σ 1/κ², which is bounded by the trace.
    let base = SturmLiouvilleSpec::kepler(Eccentricity::ZERO);
    let kappa = generalized_eigs(&base, &DMatrix::identity(2, 2), Omega::MinusOne, 32).unwrap();
    let f = ere_core::trace_engine::f_tilde(Eccentricity::ZERO).unwrap();
    let k0 = kappa[0].norm();
    assert!(1.0 / (k0 * k0) <= 2.0 * f);
}

#[test]
fn auto_truncation_converges() {
    let r = morse_index_auto(&SturmLiouvilleSpec::kepler(ecc(0.7)), Omega::MinusOne, DEFAULT_NULL_TOL).unwrap();
    assert_eq!(r.counts(), (2, 0));
    assert_eq!(r.truncation, 256);
}
