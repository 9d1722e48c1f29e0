use std::f64::consts::PI;

use ere_core::cli_scanner::{parse_csv, write_csv, ScanRow};
use ere_core::configurations::{essential_r, FamilySpec};
use ere_core::hill_index::{assemble_hill, generalized_eigs, index_at, Omega, SturmLiouvilleSpec, DEFAULT_NULL_TOL};
use ere_core::kepler_core::{gamma_kep, j4, Eccentricity};
use ere_core::ode_engine::{block_diag, integrate_between, integrate_fundamental};
use ere_core::symplectic_core::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn ecc(e: f64) -> Eccentricity {
    Eccentricity::new(e).unwrap()
}

/// A symplectic 4x4 change of basis built from shears and a block
/// `diag(A, A^{-T})`.
fn symplectic_basis(s: [f64; 3], t: [f64; 3], a: [f64; 4]) -> DMatrix<f64> {
    let sym = |v: [f64; 3]| DMatrix::from_row_slice(2, 2, &[v[0], v[1], v[1], v[2]]);
    let i2 = DMatrix::<f64>::identity(2, 2);
    let mut upper = DMatrix::identity(4, 4);
    upper.view_mut((0, 2), (2, 2)).copy_from(&sym(s));
    let mut lower = DMatrix::identity(4, 4);
    lower.view_mut((2, 0), (2, 2)).copy_from(&sym(t));
    let am = &i2 + DMatrix::from_row_slice(2, 2, &a);
    let am_inv_t = am.clone().try_inverse().unwrap().transpose();
    let mut d = DMatrix::identity(4, 4);
    d.view_mut((0, 0), (2, 2)).copy_from(&am);
    d.view_mut((2, 2), (2, 2)).copy_from(&am_inv_t);
    upper * lower * d
}

fn min_dist(set: &[Complex64], w: Complex64) -> f64 {
    set.iter().map(|z| (z - w).norm()).fold(f64::INFINITY, f64::min)
}

fn coef() -> impl Strategy<Value = f64> {
    -0.4..0.4f64
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn spectrum_pairs_under_inverse_and_conjugate(
        s in [coef(), coef(), coef()], t in [coef(), coef(), coef()], a in [coef(), coef(), coef(), coef()],
        th in 0.3..2.8f64, lam in 1.5..3.0f64, elliptic in any::<bool>(),
    ) {
        let p = symplectic_basis(s, t, a);
        let second = if elliptic { rotation(th + 0.4) } else { hyperbolic(lam) };
        let n = diamond(&rotation(th), &second).unwrap();
        let m = &p * n * p.clone().try_inverse().unwrap();
        prop_assert!(is_symplectic(&m, 1e-9).unwrap());
        let ev = eigenvalues(&m).unwrap();
        for &z in &ev {
            for w in [z.conj(), z.inv()] {
                prop_assert!(min_dist(&ev, w) <= 1e-9 * z.norm().max(1.0 / z.norm()), "{z} missing partner {w}");
            }
        }
        prop_assert!((m.determinant() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn diamond_keeps_symplecticity_and_classifies_by_blocks(
        th1 in 0.2..3.0f64, th2 in 0.2..3.0f64, l1 in 1.3..4.0f64, l2 in 1.3..4.0f64,
        h1 in any::<bool>(), h2 in any::<bool>(),
        s in [coef(), coef(), coef()], t in [coef(), coef(), coef()], a in [coef(), coef(), coef(), coef()],
    ) {
        prop_assume!(h1 || h2 || (th1 - th2).abs() > 1e-3);
        let a2 = if h1 { hyperbolic(l1) } else { rotation(th1) };
        let b2 = if h2 { hyperbolic(l2) } else { rotation(th2) };
        prop_assume!(!(h1 && h2) || (l1 - l2).abs() > 1e-3);
        let d = diamond(&a2, &b2).unwrap();
        prop_assert!(is_symplectic(&d, 1e-12).unwrap());
        let expected = match (h1, h2) {
            (false, false) => StabilityClass::EE,
            (true, true) => StabilityClass::HH,
            _ => StabilityClass::EH,
        };
        prop_assert_eq!(classify_monodromy4(&d, 1e-7).unwrap(), expected);
        // The class is a conjugacy invariant.
        let p = symplectic_basis(s, t, a);
        let c = &p * &d * p.clone().try_inverse().unwrap();
        prop_assert_eq!(classify_monodromy4(&c, 1e-7).unwrap(), expected);
    }

    #[test]
    fn symplectic_matrices_have_unit_determinant(
        s in [coef(), coef(), coef()], t in [coef(), coef(), coef()], a in [coef(), coef(), coef(), coef()],
    ) {
        let p = symplectic_basis(s, t, a);
        prop_assert!(is_symplectic(&p, 1e-9).unwrap());
        prop_assert!((p.determinant() - 1.0).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn kepler_solution_is_symplectic(e in 0.0..0.9f64, theta in 0.0..(2.0 * PI)) {
        let g = gamma_kep(ecc(e), theta).matrix;
        let scale = g.amax().max(1.0).powi(2);
        let j = j4();
        prop_assert!((g.transpose() * j * g - j).amax() <= 1e-9 * scale);
        prop_assert!((g.determinant() - 1.0).abs() <= 1e-9 * scale);
    }
}

#[test]
fn kepler_monodromy_minus_identity_has_rank_one() {
    for e in [0.0, 0.2, 0.5, 0.8, 0.95] {
        let g = gamma_kep(ecc(e), 2.0 * PI).matrix;
        let sv = (g - nalgebra::Matrix4::identity()).singular_values();
        let top = sv.max();
        let small = sv.iter().filter(|&&s| s <= 1e-9 * top.max(1.0)).count();
        assert_eq!(small, 3, "e={e}: {sv:?}");
    }
}

fn family() -> impl Strategy<Value = FamilySpec> {
    prop_oneof![
        (0.0..=9.0f64).prop_map(|b| FamilySpec::lagrange(b).unwrap()),
        (0.0..=7.0f64).prop_map(|b| FamilySpec::euler(b).unwrap()),
        (1.0..2.5f64, 0.0..1.5f64).prop_map(|(a, e)| FamilySpec::alpha_eta(a, e).unwrap()),
        (3usize..=6, 1.0..200.0f64).prop_map(|(n, m)| FamilySpec::gon(n, m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn monodromy_drift_is_bounded(spec in family(), e in 0.0..=0.99f64) {
        let rel = 1e-10;
        let sys = spec.system(ecc(e)).unwrap();
        let sol = integrate_fundamental(&sys, 2.0 * PI, rel, rel).unwrap();
        let mut off = 0;
        for d in sys.block_dims() {
            let b = sol.matrix.view((off, off), (d, d)).clone_owned();
            off += d;
            let drift = symplectic_defect(&b).unwrap() / b.amax().max(1.0).powi(2);
            prop_assert!(drift <= 100.0 * rel, "{spec:?} e={e}: {drift:e}");
        }
    }

    #[test]
    fn reversed_flow_returns_to_identity(spec in family(), e in 0.0..=0.9f64) {
        let tol = 1e-11;
        let sys = spec.system(ecc(e)).unwrap();
        let fwd = integrate_fundamental(&sys, 2.0 * PI, tol, tol).unwrap();
        // The flow through γ(2π) at θ = 2π passes through I at θ = 0.
        let back = integrate_between(&sys, 2.0 * PI, 0.0, Some(&fwd.matrix), tol, tol, false).unwrap();
        let scale = fwd.matrix.amax().max(1.0).powi(2);
        let err = (back.matrix - DMatrix::identity(sys.dim(), sys.dim())).amax();
        prop_assert!(err <= 10.0 * tol * scale, "{spec:?} e={e}: {err:e}");
    }

    #[test]
    fn halving_tolerance_moves_less_than_the_estimate(spec in family(), e in 0.0..=0.9f64) {
        let sys = spec.system(ecc(e)).unwrap();
        let coarse = integrate_fundamental(&sys, 2.0 * PI, 1e-8, 1e-8).unwrap();
        let fine = integrate_fundamental(&sys, 2.0 * PI, 5e-9, 5e-9).unwrap();
        let change = (&fine.matrix - &coarse.matrix).amax();
        let estimate = coarse.stats.error_estimate * coarse.matrix.amax().max(1.0);
        prop_assert!(change <= estimate.max(1e-12), "{spec:?} e={e}: change {change:e} estimate {estimate:e}");
    }

    #[test]
    fn essential_traces(beta in 0.0..=7.0f64) {
        let lag = essential_r(&FamilySpec::lagrange(beta.min(9.0)).unwrap()).unwrap();
        prop_assert!((lag[0].trace() - 3.0).abs() <= 1e-12);
        let eul = essential_r(&FamilySpec::euler(beta).unwrap()).unwrap();
        prop_assert!((eul[0].trace() - (beta + 3.0)).abs() <= 1e-12);
    }

    #[test]
    fn hill_matrices_are_hermitian(e in 0.0..0.95f64, r in [-3.0..3.0f64, -3.0..3.0, -3.0..3.0], k in 8usize..24) {
        let spec = SturmLiouvilleSpec::new(ecc(e), DMatrix::from_row_slice(2, 2, &[r[0], r[1], r[1], r[2]])).unwrap();
        for omega in Omega::BOTH {
            prop_assert!(assemble_hill(&spec, omega, k).unwrap().hermitian_defect() <= 1e-12);
        }
    }

    #[test]
    fn index_adds_over_blocks(e in 0.0..0.8f64, a in [-2.0..4.0f64, -2.0..4.0, -1.0..1.0], b in [-2.0..4.0f64, -2.0..4.0, -1.0..1.0]) {
        let m = |v: [f64; 3]| DMatrix::from_row_slice(2, 2, &[v[0], v[2], v[2], v[1]]);
        let blocks = [m(a), m(b)];
        for omega in Omega::BOTH {
            let parts: Vec<_> = blocks.iter().map(|x| index_at(&SturmLiouvilleSpec::new(ecc(e), x.clone()).unwrap(), omega, 24, DEFAULT_NULL_TOL).unwrap()).collect();
            let whole = index_at(&SturmLiouvilleSpec::new(ecc(e), block_diag(&blocks)).unwrap(), omega, 24, DEFAULT_NULL_TOL).unwrap();
            prop_assert_eq!(whole.morse, parts.iter().map(|p| p.morse).sum::<usize>());
            prop_assert_eq!(whole.nullity, parts.iter().map(|p| p.nullity).sum::<usize>());
        }
    }

    #[test]
    fn generalized_eigenvalues_real_for_positive_base(e in 0.0..0.8f64, c in 1.05..3.0f64, w in [-1.0..1.0f64, -1.0..1.0, -1.0..1.0]) {
        let base = SturmLiouvilleSpec::new(ecc(e), DMatrix::identity(2, 2) * c).unwrap();
        let weight = DMatrix::from_row_slice(2, 2, &[w[0], w[2], w[2], w[1]]);
        for omega in Omega::BOTH {
            for k in generalized_eigs(&base, &weight, omega, 16).unwrap() {
                prop_assert!(k.im.abs() <= 1e-7 * k.norm().max(1.0), "{k}");
            }
        }
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(
            (any::<f64>(), any::<f64>(), prop::sample::select(vec!["EE", "EH", "HH;CS", "Degenerate", "failed"]), any::<bool>(),
             prop::collection::vec((any::<f64>(), any::<f64>()), 0..6)),
            1..8,
        ),
    ) {
        let table: Vec<ScanRow> = rows
            .into_iter()
            .map(|(p, e, c, inside, eig)| ScanRow { family: "gon[n=9;rule=all-corners]".into(), param: p, e, class: c.into(), inside_bound: inside, eigenvalues: eig })
            .collect();
        prop_assume!(table.iter().all(|r| r.param.is_finite() && r.e.is_finite() && r.eigenvalues.iter().all(|(a, b)| a.is_finite() && b.is_finite())));
        let mut buf = Vec::new();
        write_csv(&table, &mut buf).unwrap();
        let back = parse_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), table.len());
        for (x, y) in back.iter().zip(&table) {
            prop_assert_eq!(x.param.to_bits(), y.param.to_bits());
            prop_assert_eq!(x.e.to_bits(), y.e.to_bits());
            prop_assert_eq!(&x.class, &y.class);
            prop_assert_eq!(x.inside_bound, y.inside_bound);
            prop_assert_eq!(x.eigenvalues.len(), y.eigenvalues.len());
            for (a, b) in x.eigenvalues.iter().zip(&y.eigenvalues) {
                prop_assert_eq!((a.0.to_bits(), a.1.to_bits()), (b.0.to_bits(), b.1.to_bits()));
            }
        }
    }
}
