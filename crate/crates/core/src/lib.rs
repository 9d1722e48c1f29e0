//! Linear stability of elliptic relative equilibria: the Kepler fundamental
//! solution, trace-formula bounds, Hill's-method indices and monodromy
//! classification.

// Series coefficients are kept at the digits they were derived with; the
// negated float comparisons are deliberate so NaN is rejected.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_scanner;
pub mod configurations;
pub mod error;
pub mod hill_index;
pub mod kepler_core;
pub mod ode_engine;
pub mod quadrature;
pub mod symplectic_core;
pub mod trace_engine;

pub use error::{Error, Result};
pub use kepler_core::{gamma_kep, rho0, rho_integrals, Eccentricity, KeplerFrame, RhoIntegrals};
pub use symplectic_core::{
    classify_monodromy4, diamond, eigen_clusters, is_linearly_stable, is_symplectic, EigenCluster,
    StabilityClass,
};
pub use cli_scanner::{scan, Axis, ScanFamily, ScanRequest, ScanRow};
pub use configurations::{FamilySpec, XiRule};
pub use hill_index::{morse_index, IndexResult, Omega, SturmLiouvilleSpec};
pub use ode_engine::{monodromy, monodromy_with, EssentialSystem, MonodromyOptions, MonodromyResult};
pub use trace_engine::{f_half, trace_value, Half, PerturbationD, PerturbationLabel, TraceMethod};
