//! Root isolation for the shrinking-soliton parameter `mu`.
//!
//! A shrinking bundle profile (`lambda = -1`, `nu = 0`) vanishes at its left
//! endpoint `a` exactly when `f(a, mu) = 0`, where `f` is, in polynomial form,
//!
//! ```text
//! f(a, mu) = (m+1)!/(a^m mu^{m+2}) * sum_{j=0}^{m+1} c_j mu^j,
//! c_j = (2a - kappa j/(m+1)) a^{j-1} / j!      (c_0 = 2).
//! ```
//!
//! For `0 < a < kappa/2` the coefficients change sign exactly once, so by
//! Descartes' rule there is at most one positive root; positivity at
//! `mu = 2(m+1)/kappa` and negativity for large `mu` give exactly one. The
//! solver brackets it, refines by bisection plus safeguarded Newton, and
//! returns the sign-change count as a uniqueness certificate.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::profile::factorial;

/// Certified root of `f(a, mu) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuRootCertificate {
    /// The unique positive root.
    pub root: f64,
    /// Guaranteed lower bound `2(m+1)/kappa`.
    pub lower_bracket: f64,
    /// Strict sign changes of the polynomial coefficients (zeros ignored);
    /// 1 certifies uniqueness by Descartes' rule.
    pub sign_changes: u32,
    /// `|f(a, root)|` at the returned root.
    pub residual: f64,
}

/// Polynomial coefficients `c_0 .. c_{m+1}` of the closure equation.
fn coefficients(m: u32, kappa: f64, a: f64) -> Vec<f64> {
    let mf = f64::from(m);
    let mut c = Vec::with_capacity(m as usize + 2);
    c.push(2.0);
    let mut a_pow = 1.0; // a^{j-1}
    let mut j_fact = 1.0;
    for j in 1..=(m + 1) {
        j_fact *= f64::from(j);
        c.push((2.0 * a - kappa * f64::from(j) / (mf + 1.0)) * a_pow / j_fact);
        a_pow *= a;
    }
    c
}

fn validate(m: u32, kappa: f64, a: f64, mu: Option<f64>) -> Result<()> {
    if m < 1 {
        return Err(SolitonError::InvalidParameter("m must be >= 1".into()));
    }
    if !(kappa > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if !(a > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "a must be positive, got {a}"
        )));
    }
    if let Some(mu) = mu {
        if !(mu > 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "mu must be positive, got {mu}"
            )));
        }
    }
    Ok(())
}

/// Evaluate `f(a, mu)` in the polynomial (Horner) form.
pub fn f_eval(m: u32, kappa: f64, a: f64, mu: f64) -> Result<f64> {
    validate(m, kappa, a, Some(mu))?;
    let c = coefficients(m, kappa, a);
    let mut p = 0.0;
    for &cj in c.iter().rev() {
        p = p * mu + cj;
    }
    Ok(factorial(m + 1) / (a.powi(m as i32) * mu.powi(m as i32 + 2)) * p)
}

/// Analytic `d f / d mu` from the same polynomial form.
pub fn f_prime(m: u32, kappa: f64, a: f64, mu: f64) -> Result<f64> {
    validate(m, kappa, a, Some(mu))?;
    let c = coefficients(m, kappa, a);
    let mut p = 0.0;
    let mut dp = 0.0;
    for &cj in c.iter().rev() {
        dp = dp * mu + p;
        p = p * mu + cj;
    }
    let k = factorial(m + 1) / a.powi(m as i32);
    let mp2 = f64::from(m) + 2.0;
    Ok(k * (dp * mu - mp2 * p) / mu.powi(m as i32 + 3))
}

/// Signs of the polynomial coefficients, in degree order (length `m + 2`).
pub fn coefficient_signs(m: u32, kappa: f64, a: f64) -> Result<Vec<i8>> {
    validate(m, kappa, a, None)?;
    Ok(coefficients(m, kappa, a)
        .into_iter()
        .map(|c| {
            if c > 0.0 {
                1
            } else if c < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect())
}

/// Strict sign changes in a sequence, ignoring zeros.
pub fn count_sign_changes(signs: &[i8]) -> u32 {
    let mut changes = 0;
    let mut last = 0i8;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Solve `f(a, mu) = 0` for the unique positive root; requires
/// `0 < a < kappa/2`.
pub fn solve_mu(m: u32, kappa: f64, a: f64) -> Result<MuRootCertificate> {
    validate(m, kappa, a, None)?;
    if !(a < kappa / 2.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "a must satisfy 0 < a < kappa/2, got a = {a}, kappa = {kappa}"
        )));
    }

    let signs = coefficient_signs(m, kappa, a)?;
    let sign_changes = count_sign_changes(&signs);

    let lower = 2.0 * (f64::from(m) + 1.0) / kappa;
    let f_lower = f_eval(m, kappa, a, lower)?;
    if !(f_lower > 0.0) {
        return Err(SolitonError::SolverFailure(format!(
            "f at the lower bracket {lower} is {f_lower}, expected positive"
        )));
    }

    // expand the upper end until f turns negative
    let mut hi = lower;
    let mut f_hi = f_lower;
    let mut doublings = 0u32;
    while f_hi >= 0.0 {
        doublings += 1;
        if doublings > 60 {
            return Err(SolitonError::SolverFailure(
                "bracket expansion exceeded 2^60: inputs are inconsistent".into(),
            ));
        }
        hi *= 2.0;
        f_hi = f_eval(m, kappa, a, hi)?;
    }
    let mut lo = hi / 2.0;
    if f_eval(m, kappa, a, lo)? < 0.0 {
        // the sign change happened before the final doubling
        lo = lower;
    }

    // bisection down to a narrow bracket
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if f_eval(m, kappa, a, mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // safeguarded Newton: f decreases through the root, so f > 0 tightens
    // the left end; overshoots outside the bracket fall back to bisection
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f_eval(m, kappa, a, x)?;
        if fx == 0.0 {
            break;
        }
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dfx = f_prime(m, kappa, a, x)?;
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }

    let residual = f_eval(m, kappa, a, x)?.abs();
    let scale = (f_prime(m, kappa, a, x)?.abs() * x.abs()).max(f64::MIN_POSITIVE);
    if residual > 1e-12 * scale {
        return Err(SolitonError::SolverFailure(format!(
            "Newton refinement stalled: |f| = {residual:.3e} at mu = {x}"
        )));
    }

    Ok(MuRootCertificate {
        root: x,
        lower_bracket: lower,
        sign_changes,
        residual,
    })
}
