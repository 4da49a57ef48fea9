//! Lie point symmetries of the geodesic system.
//!
//! A generator X = ξ ∂_s + η^α ∂_{x^α} is prolonged to second order and
//! applied to R_i = ẍ^i + Γ^i_{jk} ẋ^j ẋ^k. On solutions (ẍ substituted from
//! the geodesic equations) the result vanishes iff X is a symmetry.

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::expr::{Expr, Var, NVARS};
use crate::geometry::{
    christoffel_components, christoffel_directional_derivative, contract_acceleration,
};
use crate::lie_algebra::{StructureConstants, ALGEBRA_DIM};
use crate::metric::{check_point, MetricParams, DIM};
use crate::report::Report;
use crate::sampling::Sampler;

pub type BasePoint = [f64; NVARS];

/// A point vector field with symbolic first and second partials of every
/// coefficient.
#[derive(Debug, Clone)]
pub struct PointVectorField {
    name: String,
    /// ξ followed by η^t, η^r, η^θ, η^φ, η^ψ.
    comps: [Expr; NVARS],
    /// `d1[c][a]` = ∂_a comps[c]
    d1: [[Expr; NVARS]; NVARS],
    /// `d2[c][a][b]` = ∂_a ∂_b comps[c]
    d2: [[[Expr; NVARS]; NVARS]; NVARS],
}

impl PointVectorField {
    pub fn new(name: impl Into<String>, xi: Expr, eta: [Expr; DIM]) -> Self {
        let [e0, e1, e2, e3, e4] = eta;
        Self::from_components(name, [xi, e0, e1, e2, e3, e4])
    }

    pub fn from_components(name: impl Into<String>, comps: [Expr; NVARS]) -> Self {
        let d1: [[Expr; NVARS]; NVARS] =
            std::array::from_fn(|c| std::array::from_fn(|a| comps[c].derivative(Var::ALL[a])));
        let d2 = std::array::from_fn(|c| {
            std::array::from_fn(|a| std::array::from_fn(|b| d1[c][a].derivative(Var::ALL[b])))
        });
        Self {
            name: name.into(),
            comps,
            d1,
            d2,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn xi(&self) -> &Expr {
        &self.comps[0]
    }

    /// η^α, α = 0..5 in (t, r, θ, φ, ψ) order.
    pub fn eta(&self, alpha: usize) -> &Expr {
        &self.comps[1 + alpha]
    }

    pub fn components(&self) -> &[Expr; NVARS] {
        &self.comps
    }

    /// Copy with coefficient `c` (0 = ξ, 1.. = η) replaced.
    pub fn with_component(&self, c: usize, e: Expr) -> Self {
        let mut comps = self.comps.clone();
        comps[c] = e;
        Self::from_components(self.name.clone(), comps)
    }

    pub fn base_point(&self, s: f64, x: &[f64; DIM]) -> BasePoint {
        [s, x[0], x[1], x[2], x[3], x[4]]
    }

    pub fn eval<S: Scalar>(&self, z: &[S; NVARS]) -> [S; NVARS] {
        std::array::from_fn(|c| self.comps[c].eval(z))
    }

    /// `[c][a]` = ∂_a of coefficient c.
    pub fn jacobian(&self, z: &BasePoint) -> [[f64; NVARS]; NVARS] {
        std::array::from_fn(|c| std::array::from_fn(|a| self.d1[c][a].eval(z)))
    }

    pub fn hessian(&self, z: &BasePoint) -> [[[f64; NVARS]; NVARS]; NVARS] {
        std::array::from_fn(|c| {
            std::array::from_fn(|a| std::array::from_fn(|b| self.d2[c][a][b].eval(z)))
        })
    }

    /// Σ coeffs[i] · fields[i].
    pub fn linear_combination(
        name: impl Into<String>,
        coeffs: &[f64],
        fields: &[PointVectorField],
    ) -> Self {
        let comps = std::array::from_fn(|c| {
            Expr::sum(
                coeffs
                    .iter()
                    .zip(fields)
                    .filter(|(a, _)| **a != 0.0)
                    .map(|(a, f)| f.comps[c].clone().scale(*a)),
            )
        });
        Self::from_components(name, comps)
    }
}

/// Max |X(z) − Y(z)| over the coefficient vector.
pub fn coefficient_difference(x: &PointVectorField, y: &PointVectorField, z: &BasePoint) -> f64 {
    let a = x.eval(z);
    let b = y.eval(z);
    a.iter().zip(&b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

/// Point of the second jet space: (s, x, ẋ, ẍ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetPoint {
    pub s: f64,
    pub x: [f64; DIM],
    pub v: [f64; DIM],
    pub a: [f64; DIM],
    pub on_shell: bool,
}

impl JetPoint {
    /// Accelerations taken from the geodesic equations.
    pub fn on_shell(s: f64, x: [f64; DIM], v: [f64; DIM], p: &MetricParams) -> Result<Self> {
        check_point(&x, p)?;
        let a = contract_acceleration(&christoffel_components(&x, p), &v);
        Ok(Self {
            s,
            x,
            v,
            a,
            on_shell: true,
        })
    }

    pub fn off_shell(s: f64, x: [f64; DIM], v: [f64; DIM], a: [f64; DIM]) -> Self {
        Self {
            s,
            x,
            v,
            a,
            on_shell: false,
        }
    }

    pub fn base_point(&self) -> BasePoint {
        [
            self.s, self.x[0], self.x[1], self.x[2], self.x[3], self.x[4],
        ]
    }
}

/// First and second prolongation coefficients η_(1), η_(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prolongation {
    pub eta1: [f64; DIM],
    pub eta2: [f64; DIM],
}

struct TotalDerivatives {
    d: [f64; NVARS],
    d2: [f64; NVARS],
}

/// D and D² of every coefficient along the jet.
fn total_derivatives(x: &PointVectorField, j: &JetPoint) -> TotalDerivatives {
    let z = j.base_point();
    let jac = x.jacobian(&z);
    let hes = x.hessian(&z);
    let (v, a) = (&j.v, &j.a);
    let mut d = [0.0; NVARS];
    let mut d2 = [0.0; NVARS];
    for c in 0..NVARS {
        let mut first = jac[c][0];
        let mut second = hes[c][0][0];
        for l in 0..DIM {
            first += jac[c][1 + l] * v[l];
            second += 2.0 * hes[c][0][1 + l] * v[l] + jac[c][1 + l] * a[l];
            for m in 0..DIM {
                second += hes[c][1 + l][1 + m] * v[l] * v[m];
            }
        }
        d[c] = first;
        d2[c] = second;
    }
    TotalDerivatives { d, d2 }
}

/// η_(1)^α = Dη^α − ẋ^α Dξ,  η_(2)^α = Dη_(1)^α − ẍ^α Dξ.
pub fn prolong2(x: &PointVectorField, j: &JetPoint) -> Prolongation {
    let TotalDerivatives { d, d2 } = total_derivatives(x, j);
    let (dxi, d2xi) = (d[0], d2[0]);
    let eta1 = std::array::from_fn(|al| d[1 + al] - j.v[al] * dxi);
    // D(Dη − ẋ Dξ) − ẍ Dξ = D²η − 2ẍ Dξ − ẋ D²ξ
    let eta2 = std::array::from_fn(|al| d2[1 + al] - 2.0 * j.a[al] * dxi - j.v[al] * d2xi);
    Prolongation { eta1, eta2 }
}

/// X^[2] R_i at an arbitrary jet point (no on-shell substitution check).
pub fn prolonged_system(x: &PointVectorField, j: &JetPoint, p: &MetricParams) -> [f64; DIM] {
    let z = j.base_point();
    let c = x.eval(&z);
    let eta: [f64; DIM] = std::array::from_fn(|l| c[1 + l]);
    let pr = prolong2(x, j);
    let gamma = christoffel_components(&j.x, p);
    let dgamma = christoffel_directional_derivative(&j.x, &eta, p);
    std::array::from_fn(|i| {
        let mut acc = pr.eta2[i];
        for jj in 0..DIM {
            for k in 0..DIM {
                acc += dgamma[i][jj][k] * j.v[jj] * j.v[k]
                    + 2.0 * gamma[i][jj][k] * pr.eta1[jj] * j.v[k];
            }
        }
        acc
    })
}

/// X^[2] R_i restricted to solutions. Rejects jets whose accelerations are
/// not the geodesic ones.
pub fn symmetry_residual(
    x: &PointVectorField,
    j: &JetPoint,
    p: &MetricParams,
) -> Result<[f64; DIM]> {
    check_point(&j.x, p)?;
    let expect = contract_acceleration(&christoffel_components(&j.x, p), &j.v);
    for (a, e) in j.a.iter().zip(&expect) {
        if (a - e).abs() > 1e-12 * e.abs().max(1.0) {
            return Err(Error::Contract(format!(
                "jet is off-shell: acceleration {a} differs from geodesic value {e}"
            )));
        }
    }
    Ok(prolonged_system(x, j, p))
}

/// [X, Y]^a = X(Y^a) − Y(X^a) on (s, x)-space.
pub fn commutator(x: &PointVectorField, y: &PointVectorField) -> PointVectorField {
    let comps = std::array::from_fn(|a| {
        let mut terms = Vec::new();
        for b in 0..NVARS {
            terms.push(x.comps[b].clone() * y.d1[a][b].clone());
            terms.push(-(y.comps[b].clone() * x.d1[a][b].clone()));
        }
        Expr::sum(terms)
    });
    PointVectorField::from_components(format!("[{}, {}]", x.name, y.name), comps)
}

fn v(var: Var) -> Expr {
    Expr::var(var)
}

/// The seven generators, X1 … X7.
pub fn basis() -> [PointVectorField; ALGEBRA_DIM] {
    let z = Expr::zero;
    let one = Expr::one;
    let th = || v(Var::Theta);
    let ph = || v(Var::Phi);
    [
        PointVectorField::new("X1", one(), [z(), z(), z(), z(), z()]),
        PointVectorField::new("X2", v(Var::S), [z(), z(), z(), z(), z()]),
        PointVectorField::new("X3", z(), [one(), z(), z(), z(), z()]),
        PointVectorField::new("X4", z(), [z(), z(), z(), one(), z()]),
        PointVectorField::new("X5", z(), [z(), z(), z(), z(), one()]),
        PointVectorField::new(
            "X6",
            z(),
            [
                z(),
                z(),
                ph().sin(),
                ph().cos() * th().cot(),
                -(ph().cos() * th().csc()),
            ],
        ),
        PointVectorField::new(
            "X7",
            z(),
            [
                z(),
                z(),
                ph().cos(),
                -(ph().sin() * th().cot()),
                ph().sin() * th().csc(),
            ],
        ),
    ]
}

/// r ∂/∂r, which is not a symmetry. Negative control.
pub fn radial_scaling() -> PointVectorField {
    let z = Expr::zero;
    PointVectorField::new("r d/dr", z(), [z(), v(Var::R), z(), z(), z()])
}

pub const RESIDUAL_TOL: f64 = 1e-8;
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// Per-generator symmetry sweep plus all 21 commutators against the
/// structure constants.
pub fn verify_symmetry_basis(p: &MetricParams, n_samples: usize, seed: u64) -> Report {
    verify_symmetry_basis_with(
        &basis(),
        &StructureConstants::standard(),
        p,
        n_samples,
        seed,
    )
}

pub fn verify_symmetry_basis_with(
    fields: &[PointVectorField; ALGEBRA_DIM],
    sc: &StructureConstants,
    p: &MetricParams,
    n_samples: usize,
    seed: u64,
) -> Report {
    const SECTION: &str = "symmetry";
    let mut report = Report::new();
    let n = n_samples.max(1);
    let mut sampler = Sampler::new(*p, seed);
    let jets: Vec<JetPoint> = (0..n).map(|_| sampler.on_shell_jet()).collect();

    for f in fields {
        let worst = jets
            .iter()
            .map(|j| match symmetry_residual(f, j, p) {
                Ok(r) => r.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
                Err(_) => f64::INFINITY,
            })
            .fold(0.0_f64, f64::max);
        report
            .threshold(
                SECTION,
                format!("on-shell residual {}", f.name()),
                worst,
                RESIDUAL_TOL,
            )
            .note(format!("{n} jets"));
    }

    let points: Vec<BasePoint> = (0..50).map(|_| sampler.base_point()).collect();
    for i in 0..ALGEBRA_DIM {
        for j in (i + 1)..ALGEBRA_DIM {
            let br = commutator(&fields[i], &fields[j]);
            let coeffs: Vec<f64> = (0..ALGEBRA_DIM).map(|k| sc.get(i, j, k)).collect();
            let expected = PointVectorField::linear_combination("table", &coeffs, fields);
            let worst = points
                .iter()
                .map(|z| coefficient_difference(&br, &expected, z))
                .fold(0.0_f64, f64::max);
            report.threshold(
                SECTION,
                format!("commutator [X{}, X{}]", i + 1, j + 1),
                worst,
                COMMUTATOR_TOL,
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn translation_in_s_has_trivial_prolongation() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 3);
        let x1 = &basis()[0];
        for _ in 0..10 {
            let pr = prolong2(x1, &smp.on_shell_jet());
            assert_eq!(max_abs(&pr.eta1), 0.0);
            assert_eq!(max_abs(&pr.eta2), 0.0);
        }
    }

    #[test]
    fn scaling_in_s_prolongation() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 4);
        let x2 = &basis()[1];
        let j = smp.on_shell_jet();
        let pr = prolong2(x2, &j);
        for al in 0..DIM {
            assert_eq!(pr.eta1[al], -j.v[al]);
            assert_eq!(pr.eta2[al], -2.0 * j.a[al]);
        }
    }

    #[test]
    fn time_translation_residual_zero() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 5);
        let j = smp.on_shell_jet();
        let r = symmetry_residual(&basis()[2], &j, &p).unwrap();
        assert!(max_abs(&r) <= 1e-10);
    }

    #[test]
    fn off_shell_jet_rejected() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 6);
        let mut j = smp.on_shell_jet();
        j.a[1] += 1e-3;
        assert!(matches!(
            symmetry_residual(&basis()[5], &j, &p),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn radial_scaling_is_not_a_symmetry() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 7);
        for _ in 0..20 {
            let r = symmetry_residual(&radial_scaling(), &smp.on_shell_jet(), &p).unwrap();
            assert!(max_abs(&r) > 1e-2);
        }
    }

    #[test]
    fn residual_vanishes_only_on_shell_for_nonaffine_fields() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 8);
        let b = basis();
        for _ in 0..10 {
            let j = smp.on_shell_jet();
            let mut off = j;
            off.on_shell = false;
            for (k, a) in off.a.iter_mut().enumerate() {
                *a += 0.3 * (k as f64 + 1.0);
            }
            for idx in [1, 5, 6] {
                assert!(max_abs(&prolonged_system(&b[idx], &j, &p)) < 1e-8);
                assert!(max_abs(&prolonged_system(&b[idx], &off, &p)) > 1e-3);
            }
        }
    }

    #[test]
    fn selected_commutators() {
        let b = basis();
        let mut smp = Sampler::new(MetricParams::default(), 9);
        for _ in 0..20 {
            let z = smp.base_point();
            assert!(coefficient_difference(&commutator(&b[0], &b[1]), &b[0], &z) < 1e-14);
            assert!(coefficient_difference(&commutator(&b[5], &b[6]), &b[3], &z) < 1e-12);
            let zero = PointVectorField::linear_combination("0", &[], &[]);
            assert_eq!(
                coefficient_difference(&commutator(&b[2], &b[4]), &zero, &z),
                0.0
            );
        }
    }

    #[test]
    fn mutation_fails_only_checks_touching_x6() {
        let p = MetricParams::default();
        let mut b = basis();
        b[5] = b[5].with_component(3, b[5].eta(2).clone().scale(1.01));
        let report = verify_symmetry_basis_with(&b, &StructureConstants::standard(), &p, 40, 1);
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert!(failed.contains(&"on-shell residual X6".to_string()));
        // [X4, X7] = −X6 compares against the mutated field too
        assert!(
            failed
                .iter()
                .all(|n| n.contains("X6") || n == "commutator [X4, X7]"),
            "{failed:?}"
        );
        assert!(failed.len() >= 2);
    }
}
