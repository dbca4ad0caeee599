//! Embedded Dormand-Prince 5(4) integrator with adaptive step control.
//!
//! Small fixed-dimension systems only; state is an `[f64; N]`. The solver
//! steps exactly onto requested output points, so sampled trajectories carry
//! no interpolation error beyond the local tolerance.

use crate::error::{Result, SolitonError};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// difference between the 5th- and 4th-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Tolerance settings for one integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

/// Integrate `dy/dt = f(t, y)` from `(t0, y0)` to `t1` (either direction).
///
/// Returns the state at `t1`. Fails with `SolverFailure` on step-size
/// collapse, reporting the last `t` reached.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerances,
) -> Result<[f64; N]> {
    if t0 == t1 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = (0.01 * span.abs()).clamp(1e-8, 0.1) * dir;
    let h_min = span.abs() * 1e-14 + 1e-300;
    let mut steps: u64 = 0;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > 100_000_000 {
            return Err(SolitonError::SolverFailure(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < h_min {
            return Err(SolitonError::SolverFailure(format!(
                "step-size collapse at t = {t} (h = {h:.3e})"
            )));
        }

        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for stage in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage] = f(t + C[stage] * h, &ys);
        }
        // stage 7 state is the 5th-order solution (FSAL)
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[6][j];
            if a != 0.0 {
                for i in 0..N {
                    y_new[i] += h * a * kj[i];
                }
            }
        }

        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
            finite &= y_new[i].is_finite();
        }
        let err = (err_sq / N as f64).sqrt();

        if !finite {
            h *= 0.5;
            continue;
        }

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k[6];
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(y)
}

/// Classic fourth-order Runge-Kutta with a fixed number of equal steps.
///
/// No adaptivity means the accumulated error is a smooth function of the
/// endpoint, which matters when sampled trajectories are differenced later
/// (adaptive step control leaves per-sample jitter that second differences
/// amplify by 1/h^2).
pub fn integrate_fixed<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t1: f64,
    steps: u32,
) -> [f64; N] {
    let h = (t1 - t0) / f64::from(steps.max(1));
    let mut t = t0;
    let mut y = y0;
    for _ in 0..steps.max(1) {
        let k1 = f(t, &y);
        let mut y2 = y;
        for i in 0..N {
            y2[i] += 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = y;
        for i in 0..N {
            y3[i] += 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = y;
        for i in 0..N {
            y4[i] += h * k3[i];
        }
        let k4 = f(t + h, &y4);
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}

/// Integrate and record the state at each of the (monotone) output points.
/// `ts[0]` must equal `t0`; the initial state is recorded there.
pub fn integrate_path<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    ts: &[f64],
    y0: [f64; N],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>> {
    let mut out = Vec::with_capacity(ts.len());
    let mut y = y0;
    out.push(y);
    for w in ts.windows(2) {
        y = integrate(f, w[0], y, w[1], tol)?;
        out.push(y);
    }
    Ok(out)
}
