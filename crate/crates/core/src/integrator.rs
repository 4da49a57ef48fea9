//! Dormand–Prince 5(4) stages with the pair's fourth-order continuous
//! extension, shared by the adaptive geodesic driver and a fixed-step
//! variant used for order measurements.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension (Hairer, Nørsett & Wanner, dense output of DOPRI5)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Result of one trial step.
pub struct Step<const N: usize> {
    pub y: [f64; N],
    /// Local error estimate (5th − 4th order).
    pub err: [f64; N],
    /// Derivative at the new point (first stage of the next step).
    pub dy: [f64; N],
    dense: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Fourth-order interpolant at fraction `theta` ∈ [0, 1] of the step.
    pub fn interpolate(&self, theta: f64) -> [f64; N] {
        let t1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.dense;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + t1 * (r3[i] + theta * (r4[i] + t1 * r5[i])))
        })
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

/// One Dormand–Prince step from (s, y) with derivative `k1` already known.
pub fn dopri_step<const N: usize, E>(
    rhs: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    s: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> Result<Step<N>, E> {
    let k2 = rhs(s + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = rhs(s + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = rhs(
        s + C4 * h,
        &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]),
    )?;
    let k5 = rhs(
        s + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = rhs(
        s + h,
        &axpy(
            y,
            h,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    )?;
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = rhs(s + h, &y_new)?;
    let err = std::array::from_fn(|i| {
        h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
    });
    let dense = {
        let diff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
        let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - diff[i]);
        let r4 = std::array::from_fn(|i| diff[i] - h * k7[i] - bspl[i]);
        let r5 = std::array::from_fn(|i| {
            h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
        });
        [*y, diff, bspl, r4, r5]
    };
    Ok(Step {
        y: y_new,
        err,
        dy: k7,
        dense,
    })
}

/// max_i |err_i| / (atol + rtol · max(|y_i|, |y_new_i|))
pub fn error_norm<const N: usize>(
    err: &[f64; N],
    y: &[f64; N],
    y_new: &[f64; N],
    rtol: f64,
    atol: f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        worst = worst.max((err[i] / sc).abs());
    }
    worst
}

/// Fixed-step integration with the 5th-order weights only.
pub fn fixed_step<const N: usize, E>(
    rhs: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    s0: f64,
    y0: &[f64; N],
    h: f64,
    n_steps: usize,
) -> Result<[f64; N], E> {
    let mut s = s0;
    let mut y = *y0;
    let mut k1 = rhs(s, &y)?;
    for _ in 0..n_steps {
        let st = dopri_step(rhs, s, &y, &k1, h)?;
        y = st.y;
        k1 = st.dy;
        s += h;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_fifth_order() {
        let mut rhs = |_s: f64, y: &[f64; 2]| -> Result<[f64; 2], ()> { Ok([y[1], -y[0]]) };
        let exact = [1.0f64.cos(), -1.0f64.sin()];
        let mut err = |n: usize| {
            let y = fixed_step(&mut rhs, 0.0, &[1.0, 0.0], 1.0 / n as f64, n).unwrap();
            ((y[0] - exact[0]).powi(2) + (y[1] - exact[1]).powi(2)).sqrt()
        };
        let order = (err(10) / err(20)).log2();
        assert!(order > 4.5, "observed order {order}");
    }

    fn osc(_s: f64, y: &[f64; 2]) -> Result<[f64; 2], ()> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn dense_output_is_fourth_order() {
        let err = |h: f64| {
            let st = dopri_step(&mut osc, 0.0, &[1.0, 0.0], &[0.0, -1.0], h).unwrap();
            let mid = st.interpolate(0.37);
            let s = 0.37 * h;
            (mid[0] - s.cos()).abs().max((mid[1] + s.sin()).abs())
        };
        assert!((err(0.2) / err(0.1)).log2() > 4.5);
        let st = dopri_step(&mut osc, 0.0, &[1.0, 0.0], &[0.0, -1.0], 0.3).unwrap();
        assert_eq!(st.interpolate(0.0), [1.0, 0.0]);
        let end = st.interpolate(1.0);
        assert!((end[0] - st.y[0]).abs() < 1e-15 && (end[1] - st.y[1]).abs() < 1e-15);
    }
}
