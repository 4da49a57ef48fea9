//! Five-dimensional charged metric with squashed S³ sections, in coordinates
//! (t, r, θ, φ, ψ).
//!
//! ```text
//! ds² = −f dt² + (k²/f) dr² + (r²/4)[k (σ₁² + σ₂²) + σ₃²]
//! f(r) = 1 − 2M/r² + q²/r⁴,   k(r) = f(r∞) r∞⁴ / (r² − r∞²)²
//! ```
//!
//! With σ₁² + σ₂² = dθ² + sin²θ dφ² and σ₃ = dψ + cosθ dφ the only
//! off-diagonal component is g_φψ. All components depend on r and θ only.
//!
//! Component functions are written against [`Scalar`] so the same code
//! produces values (`f64`) and exact partials (dual numbers).

use serde::{Deserialize, Serialize};

use crate::dual::{seed_axis, Dual, Scalar};
use crate::error::{Error, Result};

pub const DIM: usize = 5;

pub const T: usize = 0;
pub const R: usize = 1;
pub const THETA: usize = 2;
pub const PHI: usize = 3;
pub const PSI: usize = 4;

/// Coordinate labels, in index order.
pub const COORD_NAMES: [&str; DIM] = ["t", "r", "theta", "phi", "psi"];

/// Guard bands that keep evaluation away from coordinate and physical
/// singularities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    /// θ must lie in [theta_eps, π − theta_eps].
    pub theta_eps: f64,
    /// Points with |f(r)| below this are rejected.
    pub horizon: f64,
    /// r must stay below r_inf·(1 − r_inf_rel).
    pub r_inf_rel: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            theta_eps: 1e-6,
            horizon: 1e-10,
            r_inf_rel: 1e-6,
        }
    }
}

/// Mass, charge and squashing radius, in geometric units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub mass: f64,
    pub charge: f64,
    pub r_inf: f64,
    #[serde(default)]
    pub guards: Guards,
}

impl Default for MetricParams {
    /// M = 1, q = 0.5, r∞ = 10.
    fn default() -> Self {
        Self {
            mass: 1.0,
            charge: 0.5,
            r_inf: 10.0,
            guards: Guards::default(),
        }
    }
}

impl MetricParams {
    pub fn new(mass: f64, charge: f64, r_inf: f64) -> Result<Self> {
        let p = Self {
            mass,
            charge,
            r_inf,
            guards: Guards::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_guards(mut self, guards: Guards) -> Self {
        self.guards = guards;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            mass: m,
            charge: q,
            r_inf,
            ..
        } = *self;
        if !(m.is_finite() && q.is_finite() && r_inf.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if m <= 0.0 {
            return Err(Error::InvalidParams(format!("mass must be > 0, got {m}")));
        }
        if q < 0.0 {
            return Err(Error::InvalidParams(format!(
                "charge must be >= 0, got {q}"
            )));
        }
        if r_inf <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "r_inf must be > 0, got {r_inf}"
            )));
        }
        if m * m < q * q {
            return Err(Error::InvalidParams(format!(
                "M² < q² (M = {m}, q = {q}): no real horizon"
            )));
        }
        let rp = self.outer_horizon();
        if rp >= r_inf {
            return Err(Error::InvalidParams(format!(
                "outer horizon r+ = {rp} is not inside r_inf = {r_inf}"
            )));
        }
        Ok(())
    }

    /// r₊ = sqrt(M + sqrt(M² − q²)), the larger root of f in r.
    pub fn outer_horizon(&self) -> f64 {
        let disc = (self.mass * self.mass - self.charge * self.charge).max(0.0);
        (self.mass + disc.sqrt()).sqrt()
    }
}

/// A point of the 5-dimensional spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl Coordinates {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64, psi: f64) -> Self {
        Self {
            t,
            r,
            theta,
            phi,
            psi,
        }
    }

    pub fn to_array(&self) -> [f64; DIM] {
        [self.t, self.r, self.theta, self.phi, self.psi]
    }

    pub fn from_array(a: [f64; DIM]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }
}

impl From<[f64; DIM]> for Coordinates {
    fn from(a: [f64; DIM]) -> Self {
        Self::from_array(a)
    }
}

/// Symmetric 5×5 covariant (or contravariant) component matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor(pub [[f64; DIM]; DIM]);

impl MetricTensor {
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[mu][nu]
    }

    /// vᵀ g w
    #[allow(clippy::needless_range_loop)]
    pub fn pair(&self, v: &[f64; DIM], w: &[f64; DIM]) -> f64 {
        let mut acc = 0.0;
        for mu in 0..DIM {
            for nu in 0..DIM {
                acc += self.0[mu][nu] * v[mu] * w[nu];
            }
        }
        acc
    }

    pub fn to_nalgebra(&self) -> nalgebra::SMatrix<f64, DIM, DIM> {
        nalgebra::SMatrix::from_fn(|i, j| self.0[i][j])
    }
}

/// ∂g_{μν}/∂x^λ stored as `[λ][μ][ν]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDerivatives(pub [[[f64; DIM]; DIM]; DIM]);

impl MetricDerivatives {
    pub fn get(&self, lambda: usize, mu: usize, nu: usize) -> f64 {
        self.0[lambda][mu][nu]
    }
}

// ---------------------------------------------------------------------------
// Scalar-generic closed forms
// ---------------------------------------------------------------------------

pub fn lapse<S: Scalar>(r: S, p: &MetricParams) -> S {
    let r2 = r * r;
    let inv2 = r2.recip();
    S::one() - inv2.scale(2.0 * p.mass) + (inv2 * inv2).scale(p.charge * p.charge)
}

pub fn squash<S: Scalar>(r: S, p: &MetricParams) -> S {
    let ri2 = p.r_inf * p.r_inf;
    let num = lapse(p.r_inf, p) * ri2 * ri2;
    let d = r * r - S::from_f64(ri2);
    (d * d).recip().scale(num)
}

/// Covariant components at `x` (no domain checks).
pub fn metric_components<S: Scalar>(x: &[S; DIM], p: &MetricParams) -> [[S; DIM]; DIM] {
    let r = x[R];
    let th = x[THETA];
    let f = lapse(r, p);
    let k = squash(r, p);
    let (s, c) = (th.sin(), th.cos());
    let q = (r * r).scale(0.25);

    let mut g = [[S::zero(); DIM]; DIM];
    g[T][T] = -f;
    g[R][R] = k * k / f;
    g[THETA][THETA] = q * k;
    g[PHI][PHI] = q * (k * s * s + c * c);
    g[PHI][PSI] = q * c;
    g[PSI][PHI] = g[PHI][PSI];
    g[PSI][PSI] = q;
    g
}

/// Inverse of the block-structured metric (no domain checks).
pub fn inverse_components<S: Scalar>(g: &[[S; DIM]; DIM]) -> [[S; DIM]; DIM] {
    let mut inv = [[S::zero(); DIM]; DIM];
    inv[T][T] = g[T][T].recip();
    inv[R][R] = g[R][R].recip();
    inv[THETA][THETA] = g[THETA][THETA].recip();
    let det = g[PHI][PHI] * g[PSI][PSI] - g[PHI][PSI] * g[PHI][PSI];
    let idet = det.recip();
    inv[PHI][PHI] = g[PSI][PSI] * idet;
    inv[PSI][PSI] = g[PHI][PHI] * idet;
    inv[PHI][PSI] = -(g[PHI][PSI] * idet);
    inv[PSI][PHI] = inv[PHI][PSI];
    inv
}

/// ∂g_{μν}/∂x^λ by one dual pass per coordinate (no domain checks).
pub fn metric_partials<S: Scalar>(x: &[S; DIM], p: &MetricParams) -> [[[S; DIM]; DIM]; DIM] {
    let mut dg = [[[S::zero(); DIM]; DIM]; DIM];
    // t, φ, ψ never appear in the components.
    for lambda in [R, THETA] {
        let xd = seed_axis(x, lambda);
        let g: [[Dual<S>; DIM]; DIM] = metric_components(&xd, p);
        for mu in 0..DIM {
            for nu in 0..DIM {
                dg[lambda][mu][nu] = g[mu][nu].eps;
            }
        }
    }
    dg
}

/// Same as [`metric_partials`] but seeding all five coordinates, including
/// the ignorable ones. Used to certify that the skipped slices vanish.
pub fn metric_partials_all_axes(x: &[f64; DIM], p: &MetricParams) -> [[[f64; DIM]; DIM]; DIM] {
    let mut dg = [[[0.0; DIM]; DIM]; DIM];
    for (lambda, slice) in dg.iter_mut().enumerate() {
        let g = metric_components(&seed_axis(x, lambda), p);
        for mu in 0..DIM {
            for nu in 0..DIM {
                slice[mu][nu] = g[mu][nu].eps;
            }
        }
    }
    dg
}

// ---------------------------------------------------------------------------
// Checked public surface
// ---------------------------------------------------------------------------

fn finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not finite ({v})")))
    }
}

/// f(r) = 1 − 2M/r² + q²/r⁴.
pub fn lapse_f(r: f64, p: &MetricParams) -> Result<f64> {
    finite(r, "r")?;
    finite(p.mass, "M")?;
    finite(p.charge, "q")?;
    if r <= 0.0 {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    Ok(lapse(r, p))
}

/// f′(r) = 4M/r³ − 4q²/r⁵, written out by hand.
pub fn lapse_f_prime(r: f64, p: &MetricParams) -> Result<f64> {
    lapse_f(r, p)?;
    Ok(4.0 * p.mass / r.powi(3) - 4.0 * p.charge * p.charge / r.powi(5))
}

fn check_squash_arg(r: f64, p: &MetricParams) -> Result<()> {
    finite(r, "r")?;
    finite(p.r_inf, "r_inf")?;
    if r < 0.0 {
        return Err(Error::Domain(format!("r must be >= 0, got {r}")));
    }
    if (r - p.r_inf).abs() <= p.guards.r_inf_rel * p.r_inf {
        return Err(Error::SquashingPole { r, r_inf: p.r_inf });
    }
    if r > p.r_inf {
        return Err(Error::Domain(format!(
            "r = {r} exceeds r_inf = {}",
            p.r_inf
        )));
    }
    Ok(())
}

/// k(r) = f(r∞) r∞⁴ / (r² − r∞²)².
pub fn squash_k(r: f64, p: &MetricParams) -> Result<f64> {
    check_squash_arg(r, p)?;
    Ok(squash(r, p))
}

/// k′(r) = −4 r f(r∞) r∞⁴ / (r² − r∞²)³, written out by hand.
pub fn squash_k_prime(r: f64, p: &MetricParams) -> Result<f64> {
    check_squash_arg(r, p)?;
    let ri2 = p.r_inf * p.r_inf;
    let d = r * r - ri2;
    Ok(-4.0 * r * lapse(p.r_inf, p) * ri2 * ri2 / (d * d * d))
}

/// Domain checks shared by every point-wise evaluation.
pub fn check_point(x: &[f64; DIM], p: &MetricParams) -> Result<()> {
    for (v, name) in x.iter().zip(COORD_NAMES) {
        finite(*v, name)?;
    }
    let r = x[R];
    if r <= 0.0 {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    check_squash_arg(r, p)?;
    let th = x[THETA];
    let eps = p.guards.theta_eps;
    if th < eps || th > std::f64::consts::PI - eps {
        return Err(Error::CoordinateSingularity { theta: th });
    }
    let f = lapse(r, p);
    if f.abs() < p.guards.horizon {
        return Err(Error::DegenerateMetric { r, lapse: f });
    }
    Ok(())
}

pub fn metric_at(x: &Coordinates, p: &MetricParams) -> Result<MetricTensor> {
    p.validate()?;
    let a = x.to_array();
    check_point(&a, p)?;
    Ok(MetricTensor(metric_components(&a, p)))
}

pub fn inverse_metric_at(x: &Coordinates, p: &MetricParams) -> Result<MetricTensor> {
    let g = metric_at(x, p)?;
    let det = g.0[PHI][PHI] * g.0[PSI][PSI] - g.0[PHI][PSI] * g.0[PHI][PSI];
    if det.abs() < f64::EPSILON * g.0[PHI][PHI].abs() * g.0[PSI][PSI].abs() {
        return Err(Error::CoordinateSingularity { theta: x.theta });
    }
    Ok(MetricTensor(inverse_components(&g.0)))
}

pub fn metric_derivatives_at(x: &Coordinates, p: &MetricParams) -> Result<MetricDerivatives> {
    p.validate()?;
    let a = x.to_array();
    check_point(&a, p)?;
    Ok(MetricDerivatives(metric_partials(&a, p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(m: f64, q: f64, r_inf: f64) -> MetricParams {
        MetricParams {
            mass: m,
            charge: q,
            r_inf,
            guards: Guards::default(),
        }
    }

    #[test]
    fn lapse_examples() {
        assert_eq!(lapse_f(2.0, &params(0.0, 0.0, 10.0)).unwrap(), 1.0);
        assert_eq!(lapse_f(2.0, &params(1.0, 0.0, 10.0)).unwrap(), 0.5);
        let p = params(1.0, 0.0, 10.0);
        assert!(lapse_f(p.outer_horizon(), &p).unwrap().abs() < 1e-12);
        assert!((p.outer_horizon() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(lapse_f(f64::NAN, &p), Err(Error::Domain(_))));
        assert!(matches!(lapse_f(0.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn squash_examples() {
        let p = params(1.0, 0.0, 10.0);
        assert!((squash_k(0.0, &p).unwrap() - lapse(10.0, &p)).abs() < 1e-15);
        let k = squash_k(2.0, &p).unwrap();
        assert!((k - 0.98 * 1e4 / 9216.0).abs() < 1e-14);
        assert!((k - 1.063368).abs() < 1e-6);
        assert!(matches!(
            squash_k(10.0, &p),
            Err(Error::SquashingPole { .. })
        ));
        assert!(matches!(
            squash_k(10.0 - 1e-7, &p),
            Err(Error::SquashingPole { .. })
        ));
        assert!(squash_k(9.99, &p).unwrap() > 1e5);
    }

    #[test]
    fn params_validation() {
        assert!(MetricParams::new(1.0, 0.5, 10.0).is_ok());
        assert!(MetricParams::new(1.0, 1.5, 10.0).is_err());
        assert!(MetricParams::new(-1.0, 0.0, 10.0).is_err());
        // r+ = sqrt(2) > 1.2
        assert!(MetricParams::new(1.0, 0.0, 1.2).is_err());
    }

    #[test]
    fn equatorial_plane_has_no_phi_psi_coupling() {
        let p = MetricParams::default();
        let x = Coordinates::new(0.0, 3.0, PI / 2.0, 1.0, 2.0);
        let g = metric_at(&x, &p).unwrap();
        assert!(g.get(PHI, PSI).abs() < 1e-15);
        let k = squash_k(3.0, &p).unwrap();
        assert!((g.get(PHI, PHI) - 9.0 / 4.0 * k).abs() < 1e-14);
        let gi = inverse_metric_at(&x, &p).unwrap();
        assert!(gi.get(PHI, PSI).abs() < 1e-15);
    }

    /// Expand (r²/4)[k(σ₁² + σ₂²) + σ₃²] from the one-forms themselves.
    #[test]
    #[allow(clippy::needless_range_loop)]
    fn components_match_sigma_form_expansion() {
        let p = params(1.0, 0.0, 10.0);
        let (r, th, psi) = (2.0_f64, PI / 3.0, 0.4_f64);
        let f = 0.5;
        let k = 0.98 * 1e4 / 9216.0;
        // rows: coefficients of (dθ, dφ, dψ)
        let s1 = [psi.cos(), psi.sin() * th.sin(), 0.0];
        let s2 = [-psi.sin(), psi.cos() * th.sin(), 0.0];
        let s3 = [0.0, th.cos(), 1.0];
        let mut ang = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                ang[a][b] = r * r / 4.0 * (k * (s1[a] * s1[b] + s2[a] * s2[b]) + s3[a] * s3[b]);
            }
        }
        let g = metric_at(&Coordinates::new(0.0, r, th, 0.3, psi), &p).unwrap();
        assert!((g.get(T, T) + f).abs() < 1e-15);
        assert!((g.get(R, R) - k * k / f).abs() < 1e-13);
        for a in 0..3 {
            for b in 0..3 {
                assert!((g.get(2 + a, 2 + b) - ang[a][b]).abs() < 1e-14, "({a},{b})");
            }
        }
        // block determinant (r⁴/16) k sin²θ
        let det = g.get(PHI, PHI) * g.get(PSI, PSI) - g.get(PHI, PSI).powi(2);
        assert!((det - r.powi(4) / 16.0 * k * th.sin().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn derivative_examples() {
        let p = MetricParams::default();
        let x = Coordinates::new(0.3, 3.5, 1.1, 0.2, 4.0);
        let dg = metric_derivatives_at(&x, &p).unwrap();
        assert!((dg.get(R, PSI, PSI) - 3.5 / 2.0).abs() < 1e-14);
        assert!((dg.get(THETA, PHI, PSI) + 3.5f64.powi(2) / 4.0 * 1.1f64.sin()).abs() < 1e-14);
        let all = metric_partials_all_axes(&x.to_array(), &p);
        for lambda in [T, PHI, PSI] {
            assert!(all[lambda].iter().flatten().all(|v| *v == 0.0));
        }
        for lambda in [R, THETA] {
            assert_eq!(all[lambda], dg.0[lambda]);
        }
    }

    #[test]
    fn closed_form_primes_match_dual_propagation() {
        let p = MetricParams::default();
        for r in [1.5, 2.0, 3.7, 6.0, 9.0] {
            let df = lapse(Dual::variable(r), &p).eps;
            let dk = squash(Dual::variable(r), &p).eps;
            assert!((df - lapse_f_prime(r, &p).unwrap()).abs() < 1e-13 * df.abs().max(1.0));
            assert!((dk - squash_k_prime(r, &p).unwrap()).abs() < 1e-12 * dk.abs().max(1.0));
        }
    }

    #[test]
    fn guard_errors() {
        let p = MetricParams::default();
        let rp = p.outer_horizon();
        assert!(matches!(
            metric_at(&Coordinates::new(0.0, rp, 1.0, 0.0, 0.0), &p),
            Err(Error::DegenerateMetric { .. })
        ));
        assert!(matches!(
            metric_at(&Coordinates::new(0.0, 3.0, 1e-8, 0.0, 0.0), &p),
            Err(Error::CoordinateSingularity { .. })
        ));
        assert!(matches!(
            inverse_metric_at(&Coordinates::new(0.0, 3.0, PI, 0.0, 0.0), &p),
            Err(Error::CoordinateSingularity { .. })
        ));
    }
}
