//! Geodesics, point symmetries and first integrals of a five-dimensional
//! charged black hole whose S³ horizon is squashed toward a KK bundle.
//!
//! The metric and everything derived from it (Christoffel symbols,
//! prolongations, Noether residuals) are generic over [`dual::Scalar`], so
//! exact derivatives come from forward-mode dual numbers instead of finite
//! differences. The symmetry generators are symbolic ([`expr::Expr`]) so
//! their commutators are exact.

pub mod dual;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod geometry;
pub mod integrator;
pub mod lie_algebra;
pub mod metric;
pub mod noether;
pub mod report;
pub mod sampling;
pub mod symmetry;

pub use error::{Error, Result};
pub use geodesic::{integrate, IntegratorConfig, PhaseState, Termination, Trajectory};
pub use geometry::{christoffel_at, verify_geometry, ChristoffelField};
pub use lie_algebra::{
    classify, verify_optimal_systems, AlgebraElement, Classification, Family, GroupWord,
    OptimalClass, StructureConstants,
};
pub use metric::{Coordinates, MetricParams, MetricTensor};
pub use noether::{first_integrals, verify_noether_basis, FirstIntegral, NoetherGenerator};
pub use report::{Check, Outcome, Report};
pub use symmetry::{verify_symmetry_basis, PointVectorField};

/// Seeded run of every verification sweep in a fixed order.
pub fn verify_all(p: &MetricParams, seed: u64) -> Report {
    verify_all_with(p, &StructureConstants::standard(), seed)
}

pub fn verify_all_with(p: &MetricParams, sc: &StructureConstants, seed: u64) -> Report {
    let mut r = Report::new();
    r.extend(symmetry::verify_symmetry_basis_with(
        &symmetry::basis(),
        sc,
        p,
        200,
        seed,
    ));
    r.extend(lie_algebra::verify_optimal_systems_with(sc, seed));
    r.extend(noether::verify_noether_basis(p, seed));
    r.extend(geometry::verify_geometry(p, seed));
    r
}
