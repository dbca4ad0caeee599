//! Radial reconstruction: `sigma(s)`, the potential `s + F(s)`, geodesic
//! length, and cone-aperture coefficient extraction.
//!
//! The metric data of a profile is recovered from the autonomous flow
//! `d sigma / ds = phi(sigma)` with `sigma(0) = sigma0`, together with
//! `dF/ds = sigma - 1` and the arclength `d ell / ds = sqrt(phi)`. All three
//! are integrated as one system so the columns share their accuracy.

use crate::error::{Result, SolitonError};
use crate::ode::{integrate, integrate_fixed, Tolerances};
use crate::profile::SolitonProfile;
use crate::quad::{power_law_order, tanh_sinh};

/// One record of a sampled radial solution.
#[derive(Debug, Clone, Copy)]
pub struct RadialSample {
    pub s: f64,
    pub sigma: f64,
    pub phi: f64,
    /// `F(s)`, normalized by `F(0) = 0`; `NaN` until reconstructed.
    pub f_value: f64,
    /// Kähler potential `s + F(s)`; `NaN` until reconstructed.
    pub potential: f64,
    /// Signed geodesic arclength from `sigma0` along the `s` direction;
    /// `NaN` until reconstructed.
    pub length: f64,
}

/// A sampled solution of the radial flow on a uniform `s` grid.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    profile: SolitonProfile,
    sigma0: f64,
    step: f64,
    samples: Vec<RadialSample>,
}

impl RadialSolution {
    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// Uniform grid spacing in `s`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[RadialSample] {
        &self.samples
    }

    pub fn s_min(&self) -> f64 {
        self.samples.first().map(|r| r.s).unwrap_or(f64::NAN)
    }

    pub fn s_max(&self) -> f64 {
        self.samples.last().map(|r| r.s).unwrap_or(f64::NAN)
    }

    fn column(&self, pick: impl Fn(&RadialSample) -> f64, s: f64) -> Result<f64> {
        // four-point (cubic) Lagrange interpolation on the uniform grid
        let n = self.samples.len();
        if n < 4 {
            return Err(SolitonError::InvalidParameter(
                "interpolation needs at least 4 samples".into(),
            ));
        }
        let s0 = self.samples[0].s;
        let x = (s - s0) / self.step;
        let i = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
        let t = x - i as f64;
        if !(-1.0..=2.0).contains(&t) {
            return Err(SolitonError::OutOfDomain(format!(
                "s = {s} lies outside the sampled window [{}, {}]",
                self.s_min(),
                self.s_max()
            )));
        }
        let p = [
            pick(&self.samples[i - 1]),
            pick(&self.samples[i]),
            pick(&self.samples[i + 1]),
            pick(&self.samples[i + 2]),
        ];
        Ok(
            -p[0] * t * (t - 1.0) * (t - 2.0) / 6.0
                + p[1] * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
                - p[2] * (t + 1.0) * t * (t - 2.0) / 2.0
                + p[3] * (t + 1.0) * t * (t - 1.0) / 6.0,
        )
    }

    /// Interpolated `sigma(s)` (cubic, interior of the sampled window only).
    pub fn sigma_at(&self, s: f64) -> Result<f64> {
        self.column(|r| r.sigma, s)
    }

    /// Interpolated Kähler potential `s + F(s)`.
    pub fn potential_at(&self, s: f64) -> Result<f64> {
        let v = self.column(|r| r.potential, s)?;
        if v.is_nan() {
            return Err(SolitonError::InvalidParameter(
                "potential column not reconstructed yet".into(),
            ));
        }
        Ok(v)
    }

    pub fn has_potential(&self) -> bool {
        self.samples
            .first()
            .map(|r| !r.potential.is_nan())
            .unwrap_or(false)
    }
}

fn validate_window(
    pr: &SolitonProfile,
    sigma0: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
) -> Result<()> {
    if !(sigma0 > pr.a() && sigma0 < pr.b()) {
        return Err(SolitonError::OutOfDomain(format!(
            "sigma0 = {sigma0} outside the profile interval ({}, {})",
            pr.a(),
            pr.b()
        )));
    }
    if n < 2 {
        return Err(SolitonError::InvalidParameter("need n >= 2 samples".into()));
    }
    if !(s_max > s_min) {
        return Err(SolitonError::InvalidParameter(format!(
            "empty window [{s_min}, {s_max}]"
        )));
    }
    Ok(())
}

/// Integrate the flow and record `(s, sigma, phi)` on `n` uniform samples of
/// `[s_min, s_max]`. Samples where the trajectory would exit `(a, b)` (or
/// where the step size collapses on the approach) are clipped from the
/// affected end of the grid.
pub fn integrate_sigma(
    pr: &SolitonProfile,
    sigma0: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
) -> Result<RadialSolution> {
    integrate_grid(pr, sigma0, s_min, s_max, n, false, Stepper::Adaptive)
}

/// Fill the `F`, `potential`, and `length` columns by integrating
/// `dF/ds = sigma - 1` and `d ell/ds = sqrt(phi)` along the same grid,
/// normalized to zero at `s = 0`.
pub fn reconstruct_potential(sol: &RadialSolution) -> Result<RadialSolution> {
    if sol.samples.is_empty() {
        return Err(SolitonError::InvalidParameter("no samples present".into()));
    }
    integrate_grid(
        &sol.profile,
        sol.sigma0,
        sol.s_min(),
        sol.s_max(),
        sol.samples.len(),
        true,
        Stepper::Adaptive,
    )
}

/// Fully reconstructed solution integrated with fixed equal substeps.
///
/// Adaptive stepping leaves per-sample error jitter of the order of its
/// tolerance; differencing such samples twice amplifies the jitter by
/// `1/h^2`. The fixed-step path trades a little accuracy for an error that
/// varies smoothly along the grid, which is what the full-metric
/// finite-difference check needs.
pub fn integrate_uniform(
    pr: &SolitonProfile,
    sigma0: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
) -> Result<RadialSolution> {
    integrate_grid(pr, sigma0, s_min, s_max, n, true, Stepper::Fixed(4))
}

#[derive(Clone, Copy)]
enum Stepper {
    Adaptive,
    /// Fixed RK4 with this many substeps per grid interval.
    Fixed(u32),
}

fn integrate_grid(
    pr: &SolitonProfile,
    sigma0: f64,
    s_min: f64,
    s_max: f64,
    n: usize,
    with_aux: bool,
    stepper: Stepper,
) -> Result<RadialSolution> {
    validate_window(pr, sigma0, s_min, s_max, n)?;
    let step = (s_max - s_min) / (n as f64 - 1.0);
    let grid: Vec<f64> = (0..n).map(|i| s_min + step * i as f64).collect();
    let tol = Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
    };

    let prof = *pr;
    let rhs = move |_s: f64, y: &[f64; 3]| {
        let phi = prof.phi(y[0]).unwrap_or(f64::NAN);
        [phi, y[0] - 1.0, phi.max(0.0).sqrt()]
    };

    let inside = |sigma: f64| sigma > pr.a() && sigma < pr.b();

    let mut rows: Vec<Option<RadialSample>> = vec![None; n];
    // walk the grid in both directions from s = 0
    for forward in [true, false] {
        let mut t = 0.0;
        let mut y = [sigma0, 0.0, 0.0];
        let targets: Vec<(usize, f64)> = if forward {
            grid.iter()
                .cloned()
                .enumerate()
                .filter(|&(_, s)| s >= 0.0)
                .collect()
        } else {
            grid.iter()
                .cloned()
                .enumerate()
                .filter(|&(_, s)| s < 0.0)
                .rev()
                .collect()
        };
        for (idx, s) in targets {
            let stepped = match stepper {
                Stepper::Adaptive => match integrate(&rhs, t, y, s, tol) {
                    Ok(state) => Some(state),
                    Err(SolitonError::SolverFailure(_)) => None, // clip this end
                    Err(e) => return Err(e),
                },
                Stepper::Fixed(sub) => Some(integrate_fixed(&rhs, t, y, s, sub)),
            };
            match stepped {
                Some(state) if state[0].is_finite() && inside(state[0]) => {
                    y = state;
                    t = s;
                    let phi = pr.phi(y[0])?;
                    if !(phi > 0.0) && s != 0.0 {
                        break; // positivity lost: clip this end
                    }
                    rows[idx] = Some(RadialSample {
                        s,
                        sigma: y[0],
                        phi,
                        f_value: if with_aux { y[1] } else { f64::NAN },
                        potential: if with_aux { s + y[1] } else { f64::NAN },
                        length: if with_aux { y[2] } else { f64::NAN },
                    });
                }
                _ => break,
            }
        }
    }

    let first = rows.iter().position(|r| r.is_some());
    let last = rows.iter().rposition(|r| r.is_some());
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) if l > f => (f, l),
        _ => {
            return Err(SolitonError::SolverFailure(
                "integration produced fewer than two valid samples".into(),
            ))
        }
    };
    let samples: Vec<RadialSample> = rows[first..=last]
        .iter()
        .map(|r| {
            r.ok_or_else(|| {
                SolitonError::SolverFailure("non-contiguous samples after clipping".into())
            })
        })
        .collect::<Result<_>>()?;

    Ok(RadialSolution {
        profile: *pr,
        sigma0,
        step,
        samples,
    })
}

/// Propagate `sigma` from `sigma(0) = sigma0` to a single `s`.
pub fn propagate_sigma(pr: &SolitonProfile, sigma0: f64, s: f64) -> Result<f64> {
    if !(sigma0 > pr.a() && sigma0 < pr.b()) {
        return Err(SolitonError::OutOfDomain(format!(
            "sigma0 = {sigma0} outside the profile interval ({}, {})",
            pr.a(),
            pr.b()
        )));
    }
    let prof = *pr;
    let rhs = move |_: f64, y: &[f64; 1]| [prof.phi(y[0]).unwrap_or(f64::NAN)];
    let tol = Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
    };
    Ok(integrate(&rhs, 0.0, [sigma0], s, tol)?[0])
}

/// Geodesic length `int d tau / sqrt(phi(a + tau))` over
/// `[tau_from, tau_to]` (`tau = sigma - a`). Returns `+inf` when the
/// integrand is non-integrable at an endpoint where `phi` vanishes to order
/// two or more; the order is estimated from the local power law of `|phi|`.
pub fn geodesic_length(pr: &SolitonProfile, tau_from: f64, tau_to: f64) -> Result<f64> {
    let a = pr.a();
    let lo = a + tau_from;
    let hi = a + tau_to;
    if !(tau_from >= 0.0 && tau_to > tau_from && hi <= pr.b()) {
        return Err(SolitonError::InvalidParameter(format!(
            "invalid tau range [{tau_from}, {tau_to}] for interval ({}, {})",
            pr.a(),
            pr.b()
        )));
    }

    // left endpoint: vanishing phi of order >= 2 puts it at infinite distance
    let phi_lo = if lo > 0.0 { pr.phi(lo)? } else { 0.0 };
    if phi_lo.abs() <= 1e-9 * (1.0 + pr.kappa().abs()) {
        let order = power_law_order(|t| Ok(pr.phi(lo + t)?.abs()), 1e-8, 1e-2, 25)?;
        if order >= 2.0 - 1e-2 {
            return Ok(f64::INFINITY);
        }
    }

    if hi.is_infinite() {
        // phi growing at most quadratically makes int d tau / sqrt(phi) diverge
        let g200 = pr.phi(2.0e3)?.abs();
        let g100 = pr.phi(1.0e3)?.abs();
        let growth = (g200 / g100).ln() / 2.0f64.ln();
        if growth <= 2.0 + 1e-2 {
            return Ok(f64::INFINITY);
        }
        // super-quadratic growth: extend the truncation until it settles
        let mut total = 0.0;
        let mut left = lo;
        let mut right = lo.max(1.0) * 2.0;
        loop {
            total += tanh_sinh(
                |x| 1.0 / pr.phi(x).unwrap_or(f64::NAN).sqrt(),
                left,
                right,
                1e-11,
            )?;
            let tail = tanh_sinh(
                |x| 1.0 / pr.phi(x).unwrap_or(f64::NAN).sqrt(),
                right,
                2.0 * right,
                1e-11,
            )?;
            if tail < 1e-11 * total {
                return Ok(total);
            }
            left = right;
            right *= 2.0;
            if right > 1e12 {
                return Err(SolitonError::NonConvergent(
                    "geodesic length truncation did not settle".into(),
                ));
            }
        }
    }

    // finite right endpoint: same order test if phi vanishes there
    let phi_hi = pr.phi(hi)?;
    if phi_hi.abs() <= 1e-9 * (1.0 + pr.kappa().abs()) {
        let order = power_law_order(|t| Ok(pr.phi(hi - t)?.abs()), 1e-8, 1e-2, 25)?;
        if order >= 2.0 - 1e-2 {
            return Ok(f64::INFINITY);
        }
    }

    tanh_sinh(
        |x| 1.0 / pr.phi(x).unwrap_or(f64::NAN).sqrt(),
        lo,
        hi,
        1e-11,
    )
}

/// Limit coefficient of the self-similar tail: for `mu < 0` (expanding) the
/// limit of `sigma(s) e^{2s/mu}`, for `mu > 0` (shrinking) the limit of
/// `sigma(s) e^{-2s/mu}`, both as `s -> +inf`. Estimated by repeated
/// Richardson extrapolation in the variable `x = e^{-2s/|mu|}` over the tail
/// of the sampled window; fails unless the internal error estimate is below
/// `1e-6` relative.
pub fn asymptotic_coefficient(sol: &RadialSolution, mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(SolitonError::SteadyVectorFieldDegenerate);
    }
    let n = sol.samples.len();
    if n < 24 {
        return Err(SolitonError::InvalidParameter(
            "tail extrapolation needs at least 24 samples".into(),
        ));
    }
    const K: usize = 8;
    let stride = ((n - 1) / (2 * (K - 1))).max(1);
    let delta = sol.step * stride as f64;
    let rho = (-2.0 * delta / mu.abs()).exp();

    // tail nodes in increasing s
    let mut y = [0.0f64; K];
    for (j, slot) in y.iter_mut().enumerate() {
        let idx = n - 1 - stride * (K - 1 - j);
        let r = &sol.samples[idx];
        let w = (-2.0 * r.s / mu.abs()).exp();
        *slot = r.sigma * w;
        if !slot.is_finite() || *slot <= 0.0 {
            return Err(SolitonError::NonConvergent(format!(
                "tail value {} at s = {} is unusable",
                slot, r.s
            )));
        }
    }

    if (y[K - 1] - y[K - 2]).abs() > 0.5 * y[K - 1].abs() {
        return Err(SolitonError::NonConvergent(
            "raw tail sequence is not settling".into(),
        ));
    }

    // Neville-style elimination of the known geometric corrections rho^k;
    // the diagonal (last entry of each shrinking row) is the refined value
    let mut row = y.to_vec();
    let mut prev = *row.last().unwrap();
    let mut value = prev;
    let mut err = f64::INFINITY;
    let mut rho_k = 1.0;
    for _level in 1..K {
        rho_k *= rho;
        for i in 0..row.len() - 1 {
            row[i] = (row[i + 1] - rho_k * row[i]) / (1.0 - rho_k);
        }
        row.pop();
        let diag = *row.last().unwrap();
        let change = (diag - prev).abs();
        if change <= err {
            err = change;
            value = diag;
        }
        prev = diag;
    }

    let rel = err / value.abs().max(1e-300);
    if !value.is_finite() || rel > 1e-6 {
        return Err(SolitonError::NonConvergent(format!(
            "tail extrapolation error estimate {rel:.3e} exceeds 1e-6"
        )));
    }
    Ok(value)
}

/// Direct numerical integration of the profile ODE in `sigma`,
/// `phi' = (mu - m/sigma) phi + kappa + 2 lambda sigma`, independent of the
/// closed form. Returns `phi(sigma_end)`.
pub fn oracle_integrate_linear(
    m: u32,
    kappa: f64,
    lambda: f64,
    mu: f64,
    sigma_start: f64,
    phi_start: f64,
    sigma_end: f64,
) -> Result<f64> {
    if !(sigma_start > 0.0 && sigma_end > 0.0) {
        return Err(SolitonError::OutOfDomain(
            "the linear ODE oracle must not cross sigma = 0".into(),
        ));
    }
    let mf = f64::from(m);
    let rhs = move |x: f64, y: &[f64; 1]| [(mu - mf / x) * y[0] + kappa + 2.0 * lambda * x];
    let tol = Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
    };
    Ok(integrate(&rhs, sigma_start, [phi_start], sigma_end, tol)?[0])
}
