//! Levi-Civita connection of the metric and Killing-equation residuals.
//!
//! Γ is computed from Γ^i_{jk} = ½ g^{il}(∂_j g_{lk} + ∂_k g_{lj} − ∂_l g_{jk})
//! with exact metric partials. Nothing here is transcribed from a table of
//! symbols; metric compatibility is the acceptance test.

use crate::dual::{seed_direction, Dual, Scalar};
use crate::error::{Error, Result};
use crate::expr::Var;
use crate::geodesic::{acceleration, euler_lagrange_residual};
use crate::metric::{
    check_point, inverse_components, lapse, lapse_f_prime, metric_components, metric_partials,
    squash, squash_k_prime, Coordinates, MetricParams, COORD_NAMES, DIM, R,
};
use crate::report::Report;
use crate::sampling::Sampler;
use crate::symmetry::{self, PointVectorField};

pub type Connection<S> = [[[S; DIM]; DIM]; DIM];

/// Γ^i_{jk} stored as `[i][j][k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelField(pub Connection<f64>);

impl ChristoffelField {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[i][j][k]
    }

    /// Components with |Γ| > `tol`, j ≤ k only.
    pub fn nonzero(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in j..DIM {
                    let v = self.0[i][j][k];
                    if v.abs() > tol {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    /// Human-readable label such as `Gamma^t_{t r}`.
    pub fn label(i: usize, j: usize, k: usize) -> String {
        format!(
            "Gamma^{}_{{{} {}}}",
            COORD_NAMES[i], COORD_NAMES[j], COORD_NAMES[k]
        )
    }

    /// −Γ^i_{jk} v^j v^k.
    pub fn acceleration(&self, v: &[f64; DIM]) -> [f64; DIM] {
        contract_acceleration(&self.0, v)
    }
}

pub(crate) fn contract_acceleration<S: Scalar>(gamma: &Connection<S>, v: &[S; DIM]) -> [S; DIM] {
    std::array::from_fn(|i| {
        let mut acc = S::zero();
        for j in 0..DIM {
            for k in 0..DIM {
                acc += gamma[i][j][k] * v[j] * v[k];
            }
        }
        -acc
    })
}

/// Christoffel symbols for any scalar type (no domain checks).
pub fn christoffel_components<S: Scalar>(x: &[S; DIM], p: &MetricParams) -> Connection<S> {
    let g = metric_components(x, p);
    let dg = metric_partials(x, p);
    let gi = inverse_components(&g);
    let mut gamma = [[[S::zero(); DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in j..DIM {
                let mut acc = S::zero();
                for l in 0..DIM {
                    let gil = gi[i][l];
                    if gil.value() == 0.0 {
                        continue;
                    }
                    acc += gil * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]);
                }
                let v = acc.scale(0.5);
                gamma[i][j][k] = v;
                gamma[i][k][j] = v;
            }
        }
    }
    gamma
}

pub fn christoffel_at(x: &Coordinates, p: &MetricParams) -> Result<ChristoffelField> {
    p.validate()?;
    let a = x.to_array();
    check_point(&a, p)?;
    Ok(ChristoffelField(christoffel_components(&a, p)))
}

/// Directional derivative η^λ ∂_λ Γ^i_{jk}.
pub fn christoffel_directional_derivative(
    x: &[f64; DIM],
    dir: &[f64; DIM],
    p: &MetricParams,
) -> Connection<f64> {
    let xd = seed_direction(x, dir);
    let gd: Connection<Dual<f64>> = christoffel_components(&xd, p);
    gd.map(|row| row.map(|col| col.map(|v| v.eps)))
}

/// ∂_λ g_{μν} − Γ^σ_{λμ} g_{σν} − Γ^σ_{λν} g_{μσ}, max-norm over all indices.
pub fn metric_compatibility_residual(x: &Coordinates, p: &MetricParams) -> Result<f64> {
    let a = x.to_array();
    check_point(&a, p)?;
    let g = metric_components(&a, p);
    let dg = metric_partials(&a, p);
    let gamma = christoffel_components(&a, p);
    let mut worst: f64 = 0.0;
    for l in 0..DIM {
        for m in 0..DIM {
            for n in 0..DIM {
                let mut v = dg[l][m][n];
                for s in 0..DIM {
                    v -= gamma[s][l][m] * g[s][n] + gamma[s][l][n] * g[m][s];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Lie derivative (L_Y g)_{μν} of the metric along a spatial, s-independent
/// point field.
pub fn killing_residual(
    y: &PointVectorField,
    x: &Coordinates,
    p: &MetricParams,
) -> Result<[[f64; DIM]; DIM]> {
    if !y.xi().is_zero() {
        return Err(Error::Contract(format!(
            "{} has a d/ds component; Killing residual needs a spatial field",
            y.name()
        )));
    }
    if !y.components().iter().all(|c| c.independent_of(Var::S)) {
        return Err(Error::Contract(format!(
            "{} depends on s; Killing residual needs an s-independent field",
            y.name()
        )));
    }
    let a = x.to_array();
    check_point(&a, p)?;
    let z = y.base_point(0.0, &a);
    let vals = y.eval(&z);
    let jac = y.jacobian(&z);
    let comp = |lambda: usize| vals[1 + lambda];
    // ∂_μ Y^λ
    let dy = |mu: usize, lambda: usize| jac[1 + lambda][1 + mu];

    let g = metric_components(&a, p);
    let dg = metric_partials(&a, p);
    let mut out = [[0.0; DIM]; DIM];
    for mu in 0..DIM {
        for nu in 0..DIM {
            let mut acc = 0.0;
            for lambda in 0..DIM {
                acc += comp(lambda) * dg[lambda][mu][nu]
                    + g[lambda][nu] * dy(mu, lambda)
                    + g[mu][lambda] * dy(nu, lambda);
            }
            out[mu][nu] = acc;
        }
    }
    Ok(out)
}

/// Max |entry| of a square matrix.
pub fn max_abs<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    m.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
}

/// Γ built from central differences of the metric components, step `h`.
pub fn christoffel_finite_difference(x: &[f64; DIM], p: &MetricParams, h: f64) -> Connection<f64> {
    let mut dg = [[[0.0; DIM]; DIM]; DIM];
    for (l, dgl) in dg.iter_mut().enumerate() {
        let mut xp = *x;
        let mut xm = *x;
        xp[l] += h;
        xm[l] -= h;
        let gp = metric_components(&xp, p);
        let gm = metric_components(&xm, p);
        for m in 0..DIM {
            for n in 0..DIM {
                dgl[m][n] = (gp[m][n] - gm[m][n]) / (2.0 * h);
            }
        }
    }
    let gi = inverse_components(&metric_components(x, p));
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                0.5 * (0..DIM)
                    .map(|l| gi[i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]))
                    .sum::<f64>()
            })
        })
    })
}

pub const COMPATIBILITY_TOL: f64 = 1e-10;
pub const FD_REL_TOL: f64 = 1e-6;
pub const EULER_LAGRANGE_TOL: f64 = 1e-9;

/// Metric compatibility, the finite-difference oracle for Γ, closed-form
/// against dual-number radial derivatives, Euler–Lagrange equivalence of
/// the geodesic accelerations and the Killing equation for the isometries.
pub fn verify_geometry(p: &MetricParams, seed: u64) -> Report {
    const SECTION: &str = "geometry";
    let mut report = Report::new();
    let mut smp = Sampler::new(*p, seed.wrapping_add(0x6e0));
    let points: Vec<[f64; DIM]> = (0..100).map(|_| smp.point()).collect();

    let worst = points
        .iter()
        .map(|x| {
            metric_compatibility_residual(&Coordinates::from_array(*x), p).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    report
        .threshold(SECTION, "metric compatibility", worst, COMPATIBILITY_TOL)
        .note("100 points");

    let worst = points
        .iter()
        .map(|x| {
            let ad = christoffel_components(x, p);
            let fd = christoffel_finite_difference(x, p, 1e-5);
            let scale = ad
                .iter()
                .flatten()
                .flatten()
                .fold(1.0_f64, |m, v| m.max(v.abs()));
            let diff = ad
                .iter()
                .flatten()
                .flatten()
                .zip(fd.iter().flatten().flatten())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            diff / scale
        })
        .fold(0.0, f64::max);
    report
        .threshold(
            SECTION,
            "Christoffel autodiff vs finite difference",
            worst,
            FD_REL_TOL,
        )
        .note("relative, 100 points");

    let worst = points
        .iter()
        .map(|x| {
            let r = x[R];
            let rd = Dual::variable(r);
            let (f1, k1) = (lapse(rd, p).eps, squash(rd, p).eps);
            match (lapse_f_prime(r, p), squash_k_prime(r, p)) {
                (Ok(f), Ok(k)) => {
                    ((f - f1).abs() / f.abs().max(1.0)).max((k - k1).abs() / k.abs().max(1.0))
                }
                _ => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max);
    report.threshold(SECTION, "f' and k' closed form vs autodiff", worst, 1e-12);

    let worst = (0..1000)
        .map(|_| {
            let st = smp.phase_state();
            acceleration(&st, p)
                .and_then(|a| euler_lagrange_residual(&st, &a, p))
                .map_or(f64::INFINITY, |e| {
                    e.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
                })
        })
        .fold(0.0, f64::max);
    report
        .threshold(
            SECTION,
            "Euler-Lagrange vs Christoffel form",
            worst,
            EULER_LAGRANGE_TOL,
        )
        .note("1000 states");

    let fields = symmetry::basis();
    for i in [2, 3, 4, 5, 6] {
        let worst = points
            .iter()
            .map(|x| {
                killing_residual(&fields[i], &Coordinates::from_array(*x), p)
                    .map_or(f64::INFINITY, |m| max_abs(&m))
            })
            .fold(0.0, f64::max);
        report.threshold(
            SECTION,
            format!("Killing equation {}", fields[i].name()),
            worst,
            1e-10,
        );
    }
    report
}
