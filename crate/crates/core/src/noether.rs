//! Noether symmetries of the geodesic Lagrangian, their first integrals and
//! conservation monitoring along integrated geodesics.

use rayon::prelude::*;
use serde::Serialize;

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::expr::{Expr, NVARS};
use crate::geodesic::{
    acceleration, integrate, lagrangian, IntegratorConfig, PhaseState, Termination, Trajectory,
};
use crate::geometry::{killing_residual, max_abs};
use crate::metric::{check_point, metric_at, Coordinates, MetricParams, DIM};
use crate::report::{Outcome, Report};
use crate::sampling::Sampler;
use crate::symmetry::{self, coefficient_difference, BasePoint, PointVectorField};

pub const NOETHER_TOL: f64 = 1e-8;
pub const DRIFT_TOL: f64 = 1e-6;
pub const KILLING_TOL: f64 = 1e-10;
pub const POINTWISE_TOL: f64 = 1e-9;

/// Point generator Y = ξ̄ ∂_s + η̄^ν ∂_ν tested against the Noether condition.
#[derive(Debug, Clone)]
pub struct NoetherGenerator(pub PointVectorField);

impl NoetherGenerator {
    pub fn name(&self) -> &str {
        self.0.name()
    }

    pub fn field(&self) -> &PointVectorField {
        &self.0
    }
}

impl From<PointVectorField> for NoetherGenerator {
    fn from(f: PointVectorField) -> Self {
        Self(f)
    }
}

/// Y1 … Y6: the Lie generators without the scaling s ∂_s.
pub fn noether_basis() -> [NoetherGenerator; 6] {
    let [x1, _x2, x3, x4, x5, x6, x7] = symmetry::basis();
    [x1, x3, x4, x5, x6, x7]
        .into_iter()
        .enumerate()
        .map(|(k, f)| NoetherGenerator(f.renamed(format!("Y{}", k + 1))))
        .collect::<Vec<_>>()
        .try_into()
        .expect("six generators")
}

/// Index into the Lie basis (0-based) of each Y_k.
pub const LIE_INDEX: [usize; 6] = [0, 2, 3, 4, 5, 6];

/// Boundary term A(s, x).
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction(pub Expr);

impl GaugeFunction {
    pub fn zero() -> Self {
        Self(Expr::zero())
    }

    fn eval<S: Scalar>(&self, z: &[S; NVARS]) -> S {
        self.0.eval(z)
    }

    /// D_s A = A_s + A_ν ẋ^ν.
    pub fn total_derivative(&self, st: &PhaseState) -> f64 {
        let z = base_point(st);
        let mut acc = self.0.derivative(crate::expr::Var::S).eval(&z);
        for (k, var) in crate::expr::Var::ALL[1..].iter().enumerate() {
            acc += self.0.derivative(*var).eval(&z) * st.v[k];
        }
        acc
    }
}

fn base_point(st: &PhaseState) -> BasePoint {
    let x = st.x.to_array();
    [st.s, x[0], x[1], x[2], x[3], x[4]]
}

/// η̄^ν_{,s} + η̄^ν_{,μ} ẋ^μ − (ξ̄_{,s} + ξ̄_{,μ} ẋ^μ) ẋ^ν.
pub fn prolong1(y: &NoetherGenerator, st: &PhaseState) -> [f64; DIM] {
    let z = base_point(st);
    let jac = y.0.jacobian(&z);
    let total = |c: usize| {
        let mut acc = jac[c][0];
        for m in 0..DIM {
            acc += jac[c][1 + m] * st.v[m];
        }
        acc
    };
    let dxi = total(0);
    std::array::from_fn(|nu| total(1 + nu) - dxi * st.v[nu])
}

/// Y^[1] L + (D_s ξ̄) L − D_s A.
pub fn noether_residual(
    y: &NoetherGenerator,
    gauge: &GaugeFunction,
    st: &PhaseState,
    p: &MetricParams,
) -> Result<f64> {
    let x = st.x.to_array();
    check_point(&x, p)?;
    let z = base_point(st);
    let c = y.0.eval(&z);
    let eta1 = prolong1(y, st);
    let xd: [Dual<f64>; DIM] = std::array::from_fn(|i| Dual::new(x[i], c[1 + i]));
    let vd: [Dual<f64>; DIM] = std::array::from_fn(|i| Dual::new(st.v[i], eta1[i]));
    // L has no explicit s dependence, so ξ̄ ∂_s L drops out
    let l = lagrangian(&xd, &vd, p);
    let jac = y.0.jacobian(&z);
    let mut dxi = jac[0][0];
    for m in 0..DIM {
        dxi += jac[0][1 + m] * st.v[m];
    }
    Ok(l.eps + dxi * l.re - gauge.total_derivative(st))
}

/// ∂L/∂ẋ^μ at any scalar type.
fn momenta<S: Scalar>(x: &[S; DIM], v: &[S; DIM], p: &MetricParams) -> [S; DIM] {
    let xd: [Dual<S>; DIM] = x.map(Dual::constant);
    std::array::from_fn(|mu| {
        let vd: [Dual<S>; DIM] = std::array::from_fn(|i| {
            if i == mu {
                Dual::variable(v[i])
            } else {
                Dual::constant(v[i])
            }
        });
        lagrangian(&xd, &vd, p).eps
    })
}

/// T = ξ̄ L + (η̄^μ − ẋ^μ ξ̄) ∂L/∂ẋ^μ − A.
#[derive(Debug, Clone)]
pub struct FirstIntegral {
    pub generator: NoetherGenerator,
    pub gauge: GaugeFunction,
    pub params: MetricParams,
}

impl FirstIntegral {
    pub fn name(&self) -> &str {
        self.generator.name()
    }

    pub fn evaluate_generic<S: Scalar>(&self, s: S, x: &[S; DIM], v: &[S; DIM]) -> S {
        let z: [S; NVARS] = [s, x[0], x[1], x[2], x[3], x[4]];
        let c = self.generator.0.eval(&z);
        let xi = c[0];
        let l = lagrangian(x, v, &self.params);
        let pm = momenta(x, v, &self.params);
        let mut t = xi * l;
        for mu in 0..DIM {
            t += (c[1 + mu] - v[mu] * xi) * pm[mu];
        }
        t - self.gauge.eval(&z)
    }

    pub fn evaluate(&self, st: &PhaseState) -> Result<f64> {
        check_point(&st.x.to_array(), &self.params)?;
        Ok(self.evaluate_generic(st.s, &st.x.to_array(), &st.v))
    }

    /// D_s T along the geodesic flow through `st`.
    pub fn flow_derivative(&self, st: &PhaseState) -> Result<f64> {
        let a = acceleration(st, &self.params)?;
        let x = st.x.to_array();
        let sd = Dual::new(st.s, 1.0);
        let xd: [Dual<f64>; DIM] = std::array::from_fn(|i| Dual::new(x[i], st.v[i]));
        let vd: [Dual<f64>; DIM] = std::array::from_fn(|i| Dual::new(st.v[i], a[i]));
        Ok(self.evaluate_generic(sd, &xd, &vd).eps)
    }
}

/// States used to vet a (Y, A) pair before building its integral.
fn vetting_states(p: &MetricParams) -> Vec<PhaseState> {
    let mut smp = Sampler::new(*p, 0x5eed);
    (0..32).map(|_| smp.phase_state()).collect()
}

/// Builds the first integral after checking the Noether condition on a
/// fixed batch of states.
pub fn first_integral(
    y: &NoetherGenerator,
    gauge: &GaugeFunction,
    p: &MetricParams,
) -> Result<FirstIntegral> {
    p.validate()?;
    let mut worst: f64 = 0.0;
    for st in vetting_states(p) {
        worst = worst.max(noether_residual(y, gauge, &st, p)?.abs());
    }
    if worst.is_nan() || worst > NOETHER_TOL {
        return Err(Error::NotNoether {
            residual: worst,
            tolerance: NOETHER_TOL,
        });
    }
    Ok(FirstIntegral {
        generator: y.clone(),
        gauge: gauge.clone(),
        params: *p,
    })
}

/// The six integrals T1 … T6 with A = 0.
pub fn first_integrals(p: &MetricParams) -> Result<Vec<FirstIntegral>> {
    noether_basis()
        .iter()
        .map(|y| first_integral(y, &GaugeFunction::zero(), p))
        .collect()
}

/// 2 g_{μν} η̄^μ ẋ^ν.
pub fn killing_momentum(y: &NoetherGenerator, st: &PhaseState, p: &MetricParams) -> Result<f64> {
    let g = metric_at(&st.x, p)?;
    let c = y.0.eval(&base_point(st));
    let eta: [f64; DIM] = std::array::from_fn(|i| c[1 + i]);
    Ok(2.0 * g.pair(&eta, &st.v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub max_abs_drift: f64,
    /// max_abs_drift / max(|T(0)|, 1)
    pub relative_drift: f64,
    pub worst_index: usize,
}

pub fn conservation_drift(f: &FirstIntegral, traj: &Trajectory) -> Result<Drift> {
    let first = traj
        .samples
        .first()
        .ok_or_else(|| Error::Domain("trajectory has no samples".into()))?;
    let t0 = f.evaluate(first)?;
    let mut worst = 0.0;
    let mut worst_index = 0;
    for (k, st) in traj.samples.iter().enumerate() {
        let d = (f.evaluate(st)? - t0).abs();
        if d > worst {
            worst = d;
            worst_index = k;
        }
    }
    Ok(Drift {
        max_abs_drift: worst,
        relative_drift: worst / t0.abs().max(1.0),
        worst_index,
    })
}

/// Initial data that stays well inside the exterior for s ∈ [0, 10].
pub fn bounded_initial_state(smp: &mut Sampler) -> PhaseState {
    let x = Coordinates::new(
        smp.uniform(-1.0, 1.0),
        smp.uniform(3.0, 6.0),
        smp.uniform(0.9, std::f64::consts::PI - 0.9),
        smp.uniform(0.0, std::f64::consts::TAU),
        smp.uniform(0.0, std::f64::consts::TAU),
    );
    let v = [
        smp.uniform(1.0, 2.0),
        smp.uniform(-0.05, 0.05),
        smp.uniform(-0.05, 0.05),
        smp.uniform(-0.1, 0.1),
        smp.uniform(-0.1, 0.1),
    ];
    PhaseState::new(0.0, x, v)
}

/// Trajectories from seeded initial data, redrawing any run that leaves the
/// region before `cfg.s_end`. Returns the runs and the number of redraws.
pub fn geodesic_bundle(
    p: &MetricParams,
    cfg: &IntegratorConfig,
    n: usize,
    seed: u64,
) -> Result<(Vec<Trajectory>, usize)> {
    let mut smp = Sampler::new(*p, seed);
    let mut out = Vec::with_capacity(n);
    let mut redraws = 0;
    while out.len() < n {
        let batch: Vec<PhaseState> = (0..(n - out.len()))
            .map(|_| bounded_initial_state(&mut smp))
            .collect();
        let runs: Vec<Result<Trajectory>> =
            batch.par_iter().map(|st| integrate(st, p, cfg)).collect();
        for r in runs {
            let tr = r?;
            if tr.termination == Termination::ReachedSEnd {
                out.push(tr);
            } else {
                redraws += 1;
                if redraws > 10 * n {
                    return Err(Error::Domain(
                        "could not draw geodesics that stay in range".into(),
                    ));
                }
            }
        }
    }
    Ok((out, redraws))
}

/// Noether residuals, drift along a bundle of geodesics, the s ∂_s negative
/// control, Lie/Noether coincidence, Killing-form and pointwise checks.
pub fn verify_noether_basis(p: &MetricParams, seed: u64) -> Report {
    const SECTION: &str = "noether";
    let mut report = Report::new();
    let basis = noether_basis();
    let gauge = GaugeFunction::zero();
    let mut smp = Sampler::new(*p, seed.wrapping_add(0x4e6f));
    let states: Vec<PhaseState> = (0..200).map(|_| smp.phase_state()).collect();

    for y in &basis {
        let worst = states
            .iter()
            .map(|st| noether_residual(y, &gauge, st, p).map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max);
        report
            .threshold(
                SECTION,
                format!("Noether residual {} (A = 0)", y.name()),
                worst,
                NOETHER_TOL,
            )
            .note("200 states");
    }

    let x2 = NoetherGenerator(symmetry::basis()[1].clone());
    let worst_x2 = states
        .iter()
        .map(|st| noether_residual(&x2, &gauge, st, p).map_or(0.0, f64::abs))
        .fold(0.0, f64::max);
    report
        .exceeds(
            SECTION,
            "X2 is not Noether (negative control)",
            worst_x2,
            1e-2,
        )
        .note("residual equals -L");

    let lie = symmetry::basis();
    let points: Vec<BasePoint> = (0..50).map(|_| smp.base_point()).collect();
    let coincide = basis
        .iter()
        .zip(LIE_INDEX)
        .map(|(y, i)| {
            points
                .iter()
                .map(|z| coefficient_difference(&y.0, &lie[i], z))
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report
        .threshold(SECTION, "Noether set = Lie set minus X2", coincide, 0.0)
        .note("Y1..Y6 = X1,X3,X4,X5,X6,X7");

    let integrals = match first_integrals(p) {
        Ok(v) => v,
        Err(e) => {
            report
                .push(
                    SECTION,
                    "first integrals constructed",
                    Outcome::Fail,
                    f64::NAN,
                    0.0,
                )
                .note(e.to_string());
            return report;
        }
    };

    let cfg = IntegratorConfig::default();
    match geodesic_bundle(p, &cfg, 10, seed) {
        Ok((bundle, redraws)) => {
            for (g, tr) in bundle.iter().enumerate() {
                for f in &integrals {
                    let d = conservation_drift(f, tr).map_or(f64::INFINITY, |d| d.relative_drift);
                    report.threshold(
                        SECTION,
                        format!("drift {} geodesic {}", f.name(), g + 1),
                        d,
                        DRIFT_TOL,
                    );
                }
            }
            report
                .push(
                    SECTION,
                    "geodesic bundle",
                    Outcome::Pass,
                    redraws as f64,
                    0.0,
                )
                .note(format!("10 runs to s = {}, {redraws} redrawn", cfg.s_end));
        }
        Err(e) => {
            report
                .push(SECTION, "geodesic bundle", Outcome::Fail, f64::NAN, 0.0)
                .note(e.to_string());
        }
    }

    let killing_states: Vec<PhaseState> = (0..500).map(|_| smp.phase_state()).collect();
    for f in &integrals[1..] {
        let worst = killing_states
            .iter()
            .map(
                |st| match (f.evaluate(st), killing_momentum(&f.generator, st, p)) {
                    (Ok(t), Ok(k)) => (t - k).abs(),
                    _ => f64::INFINITY,
                },
            )
            .fold(0.0, f64::max);
        report
            .threshold(
                SECTION,
                format!("{} = 2 g(eta, v)", f.name()),
                worst,
                KILLING_TOL,
            )
            .note("500 states");
    }
    for y in &basis[1..] {
        let worst = killing_states
            .iter()
            .map(|st| killing_residual(&y.0, &st.x, p).map_or(f64::INFINITY, |m| max_abs(&m)))
            .fold(0.0, f64::max);
        report.threshold(
            SECTION,
            format!("Killing equation {}", y.name()),
            worst,
            KILLING_TOL,
        );
    }

    for f in &integrals {
        let worst = killing_states
            .iter()
            .map(|st| f.flow_derivative(st).map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max);
        report
            .threshold(
                SECTION,
                format!("D_s {} on shell", f.name()),
                worst,
                POINTWISE_TOL,
            )
            .note("500 states");
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::lapse;

    fn state() -> PhaseState {
        PhaseState::new(
            0.3,
            Coordinates::new(0.5, 3.7, 1.1, 0.4, 2.2),
            [1.4, 0.2, -0.3, 0.5, -0.7],
        )
    }

    #[test]
    fn trivial_prolongations() {
        let b = noether_basis();
        let st = state();
        assert_eq!(prolong1(&b[0], &st), [0.0; DIM]);
        assert_eq!(prolong1(&b[1], &st), [0.0; DIM]);
    }

    #[test]
    fn basis_residuals_vanish() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 3);
        for _ in 0..50 {
            let st = smp.phase_state();
            for y in noether_basis() {
                let r = noether_residual(&y, &GaugeFunction::zero(), &st, &p).unwrap();
                assert!(r.abs() < 1e-10, "{} {r}", y.name());
            }
        }
    }

    #[test]
    fn scaling_and_radial_fields_fail() {
        let p = MetricParams::default();
        let st = state();
        let x2 = NoetherGenerator(symmetry::basis()[1].clone());
        let r = noether_residual(&x2, &GaugeFunction::zero(), &st, &p).unwrap();
        let l = crate::geodesic::lagrangian_value(&st, &p).unwrap();
        assert!((r + l).abs() < 1e-12);
        let z = Expr::zero;
        let dr = NoetherGenerator(PointVectorField::new(
            "d/dr",
            z(),
            [z(), Expr::one(), z(), z(), z()],
        ));
        assert!(
            noether_residual(&dr, &GaugeFunction::zero(), &st, &p)
                .unwrap()
                .abs()
                > 1e-2
        );
        assert!(matches!(
            first_integral(&dr, &GaugeFunction::zero(), &p),
            Err(Error::NotNoether { .. })
        ));
    }

    #[test]
    fn closed_form_integrals() {
        let p = MetricParams::default();
        let t = first_integrals(&p).unwrap();
        let st = state();
        let (r, th) = (st.x.r, st.x.theta);
        let f = lapse(r, &p);
        let t2 = t[1].evaluate(&st).unwrap();
        assert!((t2 + 2.0 * f * st.v[0]).abs() < 1e-12);
        let t4 = t[3].evaluate(&st).unwrap();
        let expect = r * r / 2.0 * th.cos() * st.v[3] + r * r / 2.0 * st.v[4];
        assert!((t4 - expect).abs() < 1e-12);
        let t1 = t[0].evaluate(&st).unwrap();
        let l = crate::geodesic::lagrangian_value(&st, &p).unwrap();
        assert!((t1 + l).abs() < 1e-12);
    }

    #[test]
    fn linear_in_generator() {
        let p = MetricParams::default();
        let b = noether_basis();
        let (al, be) = (0.7, -1.3);
        let combo = PointVectorField::linear_combination(
            "combo",
            &[al, be],
            &[b[1].0.clone(), b[3].0.clone()],
        );
        let fc = first_integral(&NoetherGenerator(combo), &GaugeFunction::zero(), &p).unwrap();
        let t = first_integrals(&p).unwrap();
        let st = state();
        let lhs = fc.evaluate(&st).unwrap();
        let rhs = al * t[1].evaluate(&st).unwrap() + be * t[3].evaluate(&st).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn radial_geodesic_has_zero_phi_momentum() {
        let p = MetricParams::default();
        let st = PhaseState::new(
            0.0,
            Coordinates::new(0.0, 5.0, 1.0, 0.0, 0.0),
            [1.0, -0.2, 0.0, 0.0, 0.0],
        );
        let tr = integrate(&st, &p, &IntegratorConfig::default()).unwrap();
        let t3 = &first_integrals(&p).unwrap()[2];
        for s in &tr.samples {
            assert_eq!(t3.evaluate(s).unwrap(), 0.0);
        }
    }

    #[test]
    fn drift_localizes_corruption() {
        let p = MetricParams::default();
        let mut smp = Sampler::new(p, 9);
        let st = bounded_initial_state(&mut smp);
        let cfg = IntegratorConfig {
            s_end: 2.0,
            samples: 64,
            ..Default::default()
        };
        let mut tr = integrate(&st, &p, &cfg).unwrap();
        let t2 = &first_integrals(&p).unwrap()[1];
        let clean = conservation_drift(t2, &tr).unwrap();
        assert!(clean.relative_drift < 1e-8);
        tr.samples[37].v[0] *= 1.01;
        let bad = conservation_drift(t2, &tr).unwrap();
        assert_eq!(bad.worst_index, 37);
        assert!(bad.relative_drift > 1e-4);
    }

    #[test]
    fn prolong1_matches_flow_perturbation() {
        // move a geodesic segment along the ε-flow of Y5 and differentiate
        // its velocity numerically
        let y5 = &noether_basis()[4];
        let st = state();
        let expect = prolong1(y5, &st);
        let flow = |eps: f64, tau: f64| -> [f64; DIM] {
            // curve x(τ) = x0 + τ v, pushed by exp(ε Y5) to second order in ε
            let x0 = st.x.to_array();
            let xt: [f64; DIM] = std::array::from_fn(|i| x0[i] + tau * st.v[i]);
            let z = [st.s + tau, xt[0], xt[1], xt[2], xt[3], xt[4]];
            let c = y5.0.eval(&z);
            let jac = y5.0.jacobian(&z);
            std::array::from_fn(|i| {
                let mut second = 0.0;
                for m in 0..DIM {
                    second += jac[1 + i][1 + m] * c[1 + m];
                }
                xt[i] + eps * c[1 + i] + 0.5 * eps * eps * second
            })
        };
        let (eps, d) = (1e-4, 1e-4);
        let vel = |eps: f64| -> [f64; DIM] {
            let a = flow(eps, d);
            let b = flow(eps, -d);
            std::array::from_fn(|i| (a[i] - b[i]) / (2.0 * d))
        };
        let vp = vel(eps);
        let vm = vel(-eps);
        for i in 0..DIM {
            let fd = (vp[i] - vm[i]) / (2.0 * eps);
            assert!((fd - expect[i]).abs() < 1e-5, "{i}: {fd} vs {}", expect[i]);
        }
    }
}
