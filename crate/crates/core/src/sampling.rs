//! Seeded random points, states and jets inside the safe exterior region.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geodesic::PhaseState;
use crate::metric::{Coordinates, MetricParams, DIM};
use crate::symmetry::JetPoint;

/// Distance kept from the poles when drawing θ.
pub const THETA_MARGIN: f64 = 0.15;

/// Reproducible sampler over r ∈ (1.2 r₊, 0.8 r∞), θ away from the poles,
/// velocities in [−1, 1]⁵.
pub struct Sampler {
    rng: ChaCha8Rng,
    params: MetricParams,
}

impl Sampler {
    pub fn new(params: MetricParams, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
        }
    }

    pub fn params(&self) -> &MetricParams {
        &self.params
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn radius(&mut self) -> f64 {
        let lo = 1.2 * self.params.outer_horizon();
        let hi = 0.8 * self.params.r_inf;
        self.uniform(lo, hi)
    }

    pub fn point(&mut self) -> [f64; DIM] {
        let t = self.uniform(-10.0, 10.0);
        let r = self.radius();
        let th = self.uniform(THETA_MARGIN, PI - THETA_MARGIN);
        let ph = self.uniform(0.0, TAU);
        let ps = self.uniform(0.0, TAU);
        [t, r, th, ph, ps]
    }

    pub fn coordinates(&mut self) -> Coordinates {
        Coordinates::from_array(self.point())
    }

    pub fn velocity(&mut self) -> [f64; DIM] {
        std::array::from_fn(|_| self.uniform(-1.0, 1.0))
    }

    pub fn parameter(&mut self) -> f64 {
        self.uniform(-5.0, 5.0)
    }

    /// (s, x) base point.
    pub fn base_point(&mut self) -> [f64; DIM + 1] {
        let s = self.parameter();
        let x = self.point();
        [s, x[0], x[1], x[2], x[3], x[4]]
    }

    pub fn phase_state(&mut self) -> PhaseState {
        let s = self.parameter();
        let x = self.coordinates();
        let v = self.velocity();
        PhaseState::new(s, x, v)
    }

    pub fn on_shell_jet(&mut self) -> JetPoint {
        let st = self.phase_state();
        JetPoint::on_shell(st.s, st.x.to_array(), st.v, &self.params)
            .expect("sampled points lie inside the safe region")
    }

    pub fn element(&mut self) -> [f64; 7] {
        std::array::from_fn(|_| self.uniform(-1.0, 1.0))
    }
}
