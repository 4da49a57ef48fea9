//! Geodesic equations ẍ^i = −Γ^i_{jk} ẋ^j ẋ^k as ten first-order ODEs in the
//! affine parameter s, an adaptive integrator with guard-band termination,
//! and the Lagrangian / Euler–Lagrange formulation used to cross-check it.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::geometry::{christoffel_components, contract_acceleration};
use crate::integrator::{dopri_step, error_norm, fixed_step};
use crate::metric::{
    check_point, lapse, lapse_f_prime, squash, squash_k_prime, Coordinates, MetricParams, DIM, PHI,
    PSI, R, T, THETA,
};

pub const STATE_DIM: usize = 2 * DIM;

/// Position, velocity and affine parameter of a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub s: f64,
    pub x: Coordinates,
    /// (ṫ, ṙ, θ̇, φ̇, ψ̇)
    pub v: [f64; DIM],
}

impl PhaseState {
    pub fn new(s: f64, x: Coordinates, v: [f64; DIM]) -> Self {
        Self { s, x, v }
    }

    pub fn to_vector(&self) -> [f64; STATE_DIM] {
        let x = self.x.to_array();
        std::array::from_fn(|i| if i < DIM { x[i] } else { self.v[i - DIM] })
    }

    pub fn from_vector(s: f64, y: &[f64; STATE_DIM]) -> Self {
        Self {
            s,
            x: Coordinates::from_array(std::array::from_fn(|i| y[i])),
            v: std::array::from_fn(|i| y[DIM + i]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.to_vector().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Length of the integration interval in s.
    pub s_end: f64,
    pub max_steps: usize,
    /// Number of uniform intervals for dense output (samples + 1 points).
    pub samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-13,
            h_max: 0.05,
            s_end: 10.0,
            max_steps: 1_000_000,
            samples: 512,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad(format!(
                "tolerances must be > 0 (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            ));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return bad(format!(
                "need 0 < h_min <= h_init <= h_max (got {}, {}, {})",
                self.h_min, self.h_init, self.h_max
            ));
        }
        if !(self.s_end > 0.0 && self.s_end.is_finite()) {
            return bad(format!(
                "s_end must be positive and finite, got {}",
                self.s_end
            ));
        }
        if self.samples == 0 {
            return bad("samples must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedSEnd,
    HitHorizonGuard,
    HitPoleGuard,
    HitRInfGuard,
    StepBudgetExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedSEnd => "reached_s_end",
            Termination::HitHorizonGuard => "hit_horizon_guard",
            Termination::HitPoleGuard => "hit_pole_guard",
            Termination::HitRInfGuard => "hit_r_inf_guard",
            Termination::StepBudgetExhausted => "step_budget_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Strictly increasing in s.
    pub samples: Vec<PhaseState>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &PhaseState {
        self.samples
            .last()
            .expect("trajectory always holds the initial state")
    }
}

/// Which guard band, if any, contains `x`. The exterior requirement r > r₊
/// is folded into the horizon guard.
pub fn guard_violation(x: &[f64; DIM], p: &MetricParams) -> Option<Termination> {
    if x.iter().any(|v| !v.is_finite()) {
        return Some(nearest_guard(x, p));
    }
    if x[R] <= p.outer_horizon() {
        return Some(Termination::HitHorizonGuard);
    }
    match check_point(x, p) {
        Ok(()) => None,
        Err(Error::DegenerateMetric { .. }) => Some(Termination::HitHorizonGuard),
        Err(Error::CoordinateSingularity { .. }) => Some(Termination::HitPoleGuard),
        Err(_) => Some(Termination::HitRInfGuard),
    }
}

/// Guard that `x` is closest to, in normalized distance.
fn nearest_guard(x: &[f64; DIM], p: &MetricParams) -> Termination {
    let r = x[R];
    let th = x[THETA];
    if !r.is_finite() || !th.is_finite() {
        return Termination::HitHorizonGuard;
    }
    let horizon = lapse(r, p).abs();
    let pole = th.min(std::f64::consts::PI - th).abs();
    let rinf = ((p.r_inf - r) / p.r_inf).abs();
    if horizon <= pole && horizon <= rinf {
        Termination::HitHorizonGuard
    } else if pole <= rinf {
        Termination::HitPoleGuard
    } else {
        Termination::HitRInfGuard
    }
}

fn rhs_vector<S: Scalar>(y: &[S; STATE_DIM], p: &MetricParams) -> [S; STATE_DIM] {
    let x: [S; DIM] = std::array::from_fn(|i| y[i]);
    let v: [S; DIM] = std::array::from_fn(|i| y[DIM + i]);
    let acc = contract_acceleration(&christoffel_components(&x, p), &v);
    std::array::from_fn(|i| if i < DIM { v[i] } else { acc[i - DIM] })
}

/// (dx/ds, dv/ds) with dv^i/ds = −Γ^i_{jk} v^j v^k.
pub fn geodesic_rhs(state: &PhaseState, p: &MetricParams) -> Result<[f64; STATE_DIM]> {
    check_point(&state.x.to_array(), p)?;
    if state.v.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("velocity is not finite".into()));
    }
    Ok(rhs_vector(&state.to_vector(), p))
}

/// Accelerations −Γ^i_{jk} v^j v^k at a state.
pub fn acceleration(state: &PhaseState, p: &MetricParams) -> Result<[f64; DIM]> {
    let d = geodesic_rhs(state, p)?;
    Ok(std::array::from_fn(|i| d[DIM + i]))
}

/// L = g_{μν} ẋ^μ ẋ^ν written out term by term.
pub fn lagrangian<S: Scalar>(x: &[S; DIM], v: &[S; DIM], p: &MetricParams) -> S {
    let r = x[R];
    let th = x[THETA];
    let f = lapse(r, p);
    let k = squash(r, p);
    let (s, c) = (th.sin(), th.cos());
    let r2 = r * r;
    let q = r2.scale(0.25);
    let [td, rd, thd, phd, psd] = *v;
    -(f * td * td)
        + k * k / f * rd * rd
        + q * k * thd * thd
        + q * (k * s * s + c * c) * phd * phd
        + r2.scale(0.5) * c * phd * psd
        + q * psd * psd
}

pub fn lagrangian_value(state: &PhaseState, p: &MetricParams) -> Result<f64> {
    let x = state.x.to_array();
    check_point(&x, p)?;
    Ok(lagrangian(&x, &state.v, p))
}

/// Euler–Lagrange expressions E₁ … E₅ of the Lagrangian at (state, ẍ).
///
/// E₁ = f ẗ + f′ ṫ ṙ; E₂ … E₅ are ∂L/∂x^μ − D_s(∂L/∂ẋ^μ). Coded from the
/// closed forms of f, f′, k, k′ without going through Γ.
pub fn euler_lagrange_residual(
    state: &PhaseState,
    accel: &[f64; DIM],
    p: &MetricParams,
) -> Result<[f64; DIM]> {
    let x = state.x.to_array();
    check_point(&x, p)?;
    let r = x[R];
    let th = x[THETA];
    let f = lapse(r, p);
    let fp = lapse_f_prime(r, p)?;
    let k = squash(r, p);
    let kp = squash_k_prime(r, p)?;
    let (s, c) = th.sin_cos();
    let sin2 = (2.0 * th).sin();
    let [td, rd, thd, phd, psd] = state.v;
    let [tdd, rdd, thdd, phdd, psdd] = *accel;
    let r2 = r * r;
    let a = 2.0 * k + r * kp;
    let b = a * s * s + 2.0 * c * c;

    let e1 = f * tdd + fp * td * rd;
    let e2 = -2.0 * k * k / f * rdd - fp * td * td
        + k / (f * f) * (k * fp - 2.0 * f * kp) * rd * rd
        + r / 4.0 * a * thd * thd
        + r / 4.0 * b * phd * phd
        + r * c * phd * psd
        + r / 2.0 * psd * psd;
    let e3 = -r2 * k / 2.0 * thdd + r2 / 4.0 * (k - 1.0) * sin2 * phd * phd
        - r2 / 2.0 * s * phd * psd
        - r / 2.0 * a * rd * thd;
    let e4 = -r2 / 2.0 * (k * s * s + c * c) * phdd
        - r2 / 2.0 * c * psdd
        - r / 2.0 * b * rd * phd
        - r * c * rd * psd
        - r2 / 2.0 * (k - 1.0) * sin2 * thd * phd
        + r2 / 2.0 * s * thd * psd;
    let e5 = -r2 / 2.0 * psdd - r2 / 2.0 * c * phdd - r * c * rd * phd - r * rd * psd
        + r2 / 2.0 * s * thd * phd;
    let mut out = [0.0; DIM];
    out[T] = e1;
    out[R] = e2;
    out[THETA] = e3;
    out[PHI] = e4;
    out[PSI] = e5;
    Ok(out)
}

struct GuardHit(Termination);

/// Adaptive Dormand–Prince integration with uniform dense output.
///
/// Stages that land inside a guard band reject the step; once the step
/// size underflows `h_min` the run terminates with the guard that caused
/// it and keeps the last accepted state.
pub fn integrate(
    initial: &PhaseState,
    p: &MetricParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    p.validate()?;
    cfg.validate()?;
    if !initial.is_finite() {
        return Err(Error::Domain("initial state is not finite".into()));
    }
    let x0 = initial.x.to_array();
    check_point(&x0, p)?;
    if let Some(g) = guard_violation(&x0, p) {
        return Err(Error::Domain(format!(
            "initial state lies inside a guard band ({})",
            g.as_str()
        )));
    }

    let mut rhs = |_s: f64, y: &[f64; STATE_DIM]| -> std::result::Result<_, GuardHit> {
        let x: [f64; DIM] = std::array::from_fn(|i| y[i]);
        if let Some(g) = guard_violation(&x, p) {
            return Err(GuardHit(g));
        }
        let d = rhs_vector(y, p);
        if d.iter().any(|v| !v.is_finite()) {
            return Err(GuardHit(nearest_guard(&x, p)));
        }
        Ok(d)
    };

    let s0 = initial.s;
    let s_final = s0 + cfg.s_end;
    let n = cfg.samples;
    let sample_at = |k: usize| {
        if k == n {
            s_final
        } else {
            s0 + cfg.s_end * (k as f64 / n as f64)
        }
    };

    let mut s = s0;
    let mut y = initial.to_vector();
    let mut k1 = match rhs(s, &y) {
        Ok(d) => d,
        Err(GuardHit(g)) => {
            return Err(Error::Domain(format!(
                "initial state rejected ({})",
                g.as_str()
            )))
        }
    };
    let mut samples = vec![*initial];
    let mut next = 1usize;
    let mut h = cfg.h_init.min(cfg.s_end);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut last_guard: Option<Termination> = None;

    let termination = loop {
        if s >= s_final {
            break Termination::ReachedSEnd;
        }
        if accepted + rejected >= cfg.max_steps {
            break Termination::StepBudgetExhausted;
        }
        let remaining = s_final - s;
        let last = h >= remaining;
        let step_h = if last { remaining } else { h };

        let trial = dopri_step(&mut rhs, s, &y, &k1, step_h);
        let step = match trial {
            Ok(st) => st,
            Err(GuardHit(g)) => {
                last_guard = Some(g);
                rejected += 1;
                h = step_h * 0.25;
                if h < cfg.h_min {
                    break g;
                }
                continue;
            }
        };
        let err = error_norm(&step.err, &y, &step.y, cfg.rel_tol, cfg.abs_tol);
        if err.is_nan() || err > 1.0 {
            rejected += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            h = step_h * fac;
            if h < cfg.h_min {
                let x: [f64; DIM] = std::array::from_fn(|i| y[i]);
                break last_guard.unwrap_or_else(|| nearest_guard(&x, p));
            }
            continue;
        }

        let s_new = if last { s_final } else { s + step_h };
        while next <= n {
            let sk = sample_at(next);
            if sk > s_new {
                break;
            }
            let yk = if sk == s_new {
                step.y
            } else {
                step.interpolate((sk - s) / step_h)
            };
            samples.push(PhaseState::from_vector(sk, &yk));
            next += 1;
        }
        s = s_new;
        y = step.y;
        k1 = step.dy;
        accepted += 1;
        last_guard = None;
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (step_h * fac).min(cfg.h_max).max(cfg.h_min);
    };

    if termination != Termination::ReachedSEnd && s > samples.last().map_or(s0, |st| st.s) {
        samples.push(PhaseState::from_vector(s, &y));
    }
    Ok(Trajectory {
        samples,
        termination,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Fixed-step Dormand–Prince (5th-order weights), for convergence studies.
pub fn integrate_fixed_step(
    initial: &PhaseState,
    p: &MetricParams,
    h: f64,
    n_steps: usize,
) -> Result<PhaseState> {
    check_point(&initial.x.to_array(), p)?;
    let mut rhs = |_s: f64, y: &[f64; STATE_DIM]| -> Result<[f64; STATE_DIM]> {
        let x: [f64; DIM] = std::array::from_fn(|i| y[i]);
        check_point(&x, p)?;
        Ok(rhs_vector(y, p))
    };
    let y = fixed_step(&mut rhs, initial.s, &initial.to_vector(), h, n_steps)?;
    Ok(PhaseState::from_vector(initial.s + h * n_steps as f64, &y))
}
