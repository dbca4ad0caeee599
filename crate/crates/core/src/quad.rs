//! Tanh-sinh (double-exponential) quadrature and power-law order fitting.
//!
//! The substitution `x = mid + half * tanh((pi/2) sinh(t))` pushes the
//! abscissas double-exponentially into the endpoints, which makes the rule
//! accurate for integrands with integrable endpoint singularities such as
//! `phi^{-1/2}` near a simple zero of `phi`.

use crate::error::{Result, SolitonError};

const T_MAX: f64 = 6.6;
const MAX_LEVELS: u32 = 12;

/// Integrate `f` over `[a, b]` to the requested relative tolerance.
/// Non-finite integrand values (endpoint blowups sampled too closely) are
/// dropped from the sum; the surrounding weights are double-exponentially
/// small there.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(b > a) {
        if a == b {
            return Ok(0.0);
        }
        return Err(SolitonError::InvalidParameter(format!(
            "integration range is empty: [{a}, {b}]"
        )));
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let pi_half = std::f64::consts::FRAC_PI_2;

    let eval = |t: f64| -> f64 {
        let arg = pi_half * t.sinh();
        // 1 - tanh(arg) = 2/(e^{2 arg} + 1), kept in this form so the
        // distance to the endpoints survives in floating point
        let omu = 2.0 / ((2.0 * arg).exp() + 1.0);
        let w = pi_half * t.cosh() / (arg.cosh() * arg.cosh());
        let total = w * (guarded(&f, b - half * omu) + guarded(&f, a + half * omu));
        if total.is_finite() {
            total
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    // level 0: integer abscissas, including t = 0 once
    let mut sum = pi_half * guarded(&f, mid);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += eval(k as f64 * h);
        k += 1;
    }
    let mut integral = sum * h * half;

    // Singular integrands bottom out near 1e-9 relative: the abscissas
    // approach the endpoints below the spacing of f64 and the integrand's
    // own rounding takes over. Track the best level and detect the plateau
    // rather than refining forever.
    let mut best = integral;
    let mut best_change = f64::INFINITY;
    let mut prev_change = f64::INFINITY;
    let mut stagnant = 0;
    for _level in 1..=MAX_LEVELS {
        h *= 0.5;
        // only the new (odd-multiple) abscissas
        let mut new_sum = 0.0;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            new_sum += eval(k as f64 * h);
            k += 2;
        }
        let refined = 0.5 * integral + new_sum * h * half;
        let change = (refined - integral).abs();
        integral = refined;
        let scale = integral.abs().max(1e-300);
        if change <= rel_tol * scale {
            return Ok(integral);
        }
        if change <= best_change {
            best = integral;
            best_change = change;
        }
        stagnant = if change > 0.5 * prev_change {
            stagnant + 1
        } else {
            0
        };
        if stagnant >= 2 && best_change <= 1e-7 * scale {
            return Ok(best);
        }
        prev_change = change;
    }
    if best_change <= 1e-7 * best.abs().max(1e-300) {
        return Ok(best);
    }
    Err(SolitonError::NonConvergent(format!(
        "tanh-sinh quadrature did not converge on [{a}, {b}]"
    )))
}

fn guarded<F: Fn(f64) -> f64>(f: &F, x: f64) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Estimate the exponent `p` in `g(t) ~ C t^p` as `t -> 0+` from samples on
/// a geometric grid in `[t_lo, t_hi]`. The median of the local log-log
/// slopes is returned, which discards the noise-dominated decades that a
/// near-double zero produces at the smallest `t`.
pub fn power_law_order<G: Fn(f64) -> Result<f64>>(
    g: G,
    t_lo: f64,
    t_hi: f64,
    points: usize,
) -> Result<f64> {
    if !(t_lo > 0.0 && t_hi > t_lo) || points < 3 {
        return Err(SolitonError::InvalidParameter(
            "order fit needs 0 < t_lo < t_hi and at least 3 points".into(),
        ));
    }
    let ratio = (t_hi / t_lo).powf(1.0 / (points as f64 - 1.0));
    let mut slopes = Vec::with_capacity(points - 1);
    let mut t = t_lo;
    let mut prev: Option<(f64, f64)> = None;
    for _ in 0..points {
        let v = g(t)?.abs();
        if v > 0.0 && v.is_finite() {
            if let Some((tp, vp)) = prev {
                slopes.push((v / vp).ln() / (t / tp).ln());
            }
            prev = Some((t, v));
        } else {
            prev = None;
        }
        t *= ratio;
    }
    if slopes.len() < 3 {
        return Err(SolitonError::NonConvergent(
            "order fit: too few usable samples (function vanishes identically?)".into(),
        ));
    }
    slopes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(slopes[slopes.len() / 2])
}
