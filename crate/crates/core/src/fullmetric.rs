//! Independent full-metric verification on the two-complex-dimensional
//! radial model (round three-sphere link, `m = 1`, `kappa = 4`).
//!
//! On `C^2 - {0}` a radial Kähler potential `P(u)`, `u = r^2`, has metric
//! determinant `det g = P'(u) (P'(u) + u P''(u))`. In the log variable
//! `s = (1/2) ln u` this is `P_s P_ss / (8 u^2)` with `P_s = sigma` and
//! `P_ss = phi`. The gradient soliton identity states that
//!
//! ```text
//! Psi(u) = -ln det g(u) + 2 lambda P(u) + mu sigma(u)
//! ```
//!
//! is constant: a rotation-invariant function is pluriharmonic on
//! `C^2 - {0}` only if it is constant. The check recovers `sigma` and `phi`
//! purely by differencing the sampled potential, so it exercises the whole
//! pipeline without reusing its algebra.
//!
//! Numerical layout. The potential is sampled as `P(s) = P(s_min) + a (s -
//! s_min) + Q(s)` with the left-asymptotic linear part `a s` split off and
//! `Q` integrated upward from the left edge with fixed Runge-Kutta steps.
//! `Q` is then small exactly where `phi` is small, which keeps the
//! representation rounding of the stored column out of the second
//! differences (differencing an O(1) column against `phi -> 0` would drown
//! the check in `eps/h^2` noise). `sigma` uses the five-point fourth-order
//! first difference and `phi` the three-point second difference, so the
//! identity residual is dominated by the `phi` stencil and shrinks at
//! second order under grid refinement, while the flat model (where that
//! stencil error is grid-uniform and cancels against the mean) resolves to
//! below 1e-9.
//!
//! Sign conventions: the soliton equation is used in the Ricci-potential
//! form `rho + 2 lambda omega = -i ddbar Q` with `Q = mu sigma + const`;
//! relative to writing the soliton through a Lie derivative of the metric,
//! the potential absorbs a factor of two.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::ode::integrate_fixed;
use crate::profile::SolitonProfile;
use crate::radial::propagate_sigma;

/// Sampled radial metric model on a log grid in `u = r^2`.
#[derive(Debug, Clone)]
pub struct RadialMetricModel {
    s0: f64,
    step: f64,
    /// Anchored potential column: `P(s_i) - P(s_0) - a (s_i - s_0)`.
    q: Vec<f64>,
    /// Left-asymptotic slope of the potential (the profile's `a`).
    a_lin: f64,
    lambda: f64,
    mu: f64,
}

/// Result of the constancy check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub mean: f64,
    pub points_used: usize,
}

impl RadialMetricModel {
    /// Sample the model of an `m = 1`, `kappa = 4` profile on `n` log-grid
    /// nodes with `u in [e^{2 s_min}, e^{2 s_max}]`; `sigma(0) = sigma0`
    /// normalizes the radial coordinate.
    pub fn build(
        pr: &SolitonProfile,
        sigma0: f64,
        s_min: f64,
        s_max: f64,
        n: usize,
    ) -> Result<Self> {
        Self::build_with_parameters(pr, sigma0, s_min, s_max, n, pr.lambda(), pr.mu())
    }

    /// Same, with overriding soliton coefficients (control runs with a
    /// deliberately wrong `mu`).
    pub fn build_with_parameters(
        pr: &SolitonProfile,
        sigma0: f64,
        s_min: f64,
        s_max: f64,
        n: usize,
        lambda: f64,
        mu: f64,
    ) -> Result<Self> {
        if pr.m() != 1 {
            return Err(SolitonError::InvalidParameter(
                "the coordinate model exists only for m = 1".into(),
            ));
        }
        if (pr.kappa() - 4.0).abs() > 1e-9 {
            return Err(SolitonError::InvalidParameter(format!(
                "the round-sphere chart requires kappa = 4, got {}",
                pr.kappa()
            )));
        }
        if n < 16 || !(s_max > s_min) {
            return Err(SolitonError::InvalidParameter(
                "model needs at least 16 samples on a nonempty window".into(),
            ));
        }
        let a = pr.a();
        let step = (s_max - s_min) / (n as f64 - 1.0);
        let sigma_bottom = propagate_sigma(pr, sigma0, s_min)?;

        // fixed-step upward pass for [sigma, Q], Q' = sigma - a, Q(s_min) = 0
        let prof = *pr;
        let rhs = move |_s: f64, y: &[f64; 2]| {
            let phi = prof.phi(y[0]).unwrap_or(f64::NAN);
            [phi, y[0] - a]
        };
        let mut q = Vec::with_capacity(n);
        q.push(0.0);
        let mut y = [sigma_bottom, 0.0];
        for i in 1..n {
            let s_prev = s_min + step * (i as f64 - 1.0);
            let s_next = s_min + step * i as f64;
            y = integrate_fixed(&rhs, s_prev, y, s_next, 4);
            if !(y[0].is_finite() && y[1].is_finite()) || !(y[0] > a && y[0] < pr.b()) {
                return Err(SolitonError::SolverFailure(format!(
                    "model sampling left the profile interval at s = {s_next}"
                )));
            }
            q.push(y[1]);
        }

        Ok(Self {
            s0: s_min,
            step,
            q,
            a_lin: a,
            lambda,
            mu,
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Grid bounds `(u_min, u_max, n)`.
    pub fn grid(&self) -> (f64, f64, usize) {
        let n = self.q.len();
        let s_max = self.s0 + self.step * (n as f64 - 1.0);
        ((2.0 * self.s0).exp(), (2.0 * s_max).exp(), n)
    }

    fn u_at(&self, i: usize) -> f64 {
        (2.0 * (self.s0 + self.step * i as f64)).exp()
    }

    /// Potential relative to the left edge (the dropped constant is
    /// immaterial for both the determinant and the identity deviation).
    fn p_rel(&self, i: usize) -> f64 {
        self.a_lin * self.step * i as f64 + self.q[i]
    }

    /// `sigma = dP/ds` by the five-point fourth-order stencil.
    fn sigma_fd(&self, i: usize) -> f64 {
        let q = &self.q;
        self.a_lin + (-q[i + 2] + 8.0 * q[i + 1] - 8.0 * q[i - 1] + q[i - 2]) / (12.0 * self.step)
    }

    /// `phi = d^2P/ds^2` by the three-point second difference.
    fn phi_fd(&self, i: usize) -> f64 {
        let q = &self.q;
        (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (self.step * self.step)
    }

    fn determinant_index(&self, i: usize) -> Result<f64> {
        let sigma = self.sigma_fd(i);
        let phi = self.phi_fd(i);
        let u = self.u_at(i);
        if !(sigma > 0.0 && phi > 0.0) {
            return Err(SolitonError::VerificationFailure(format!(
                "metric positivity fails at u = {u}: P' term {sigma}, P'' term {phi}"
            )));
        }
        // det g = P'(u) (P'(u) + u P''(u)) = P_s P_ss / (8 u^2)
        Ok(sigma * phi / (8.0 * u * u))
    }

    fn index_of(&self, u: f64) -> Result<usize> {
        if !(u > 0.0) {
            return Err(SolitonError::OutOfDomain(format!(
                "u must be positive, got {u}"
            )));
        }
        let s = 0.5 * u.ln();
        let idx = ((s - self.s0) / self.step).round() as isize;
        let n = self.q.len() as isize;
        if idx < 2 || idx > n - 3 {
            return Err(SolitonError::OutOfDomain(format!(
                "u = {u} falls outside the differencing stencil range"
            )));
        }
        Ok(idx as usize)
    }

    /// Metric determinant at the grid node nearest to `u`.
    pub fn metric_determinant(&self, u: f64) -> Result<f64> {
        let i = self.index_of(u)?;
        self.determinant_index(i)
    }

    /// Recovered `sigma` at the node nearest to `u` (cross-consistency with
    /// the integrated column).
    pub fn sigma_recovered(&self, u: f64) -> Result<f64> {
        let i = self.index_of(u)?;
        Ok(self.sigma_fd(i))
    }

    /// Maximum deviation of `Psi` from its mean over the interior nodes
    /// (three points at each edge are excluded where one-sided effects
    /// degrade the stencils).
    pub fn identity_residual(&self) -> Result<IdentityCheck> {
        let n = self.q.len();
        if n < 8 {
            return Err(SolitonError::InvalidParameter("grid too short".into()));
        }
        let mut values = Vec::with_capacity(n - 6);
        for i in 3..n - 3 {
            let det = self.determinant_index(i)?;
            let psi = -det.ln() + 2.0 * self.lambda * self.p_rel(i) + self.mu * self.sigma_fd(i);
            values.push(psi);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let max_residual = values
            .iter()
            .map(|v| (v - mean).abs())
            .fold(0.0f64, f64::max);
        Ok(IdentityCheck {
            max_residual,
            mean,
            points_used: values.len(),
        })
    }
}

/// Observed convergence order between a coarse- and a fine-grid residual
/// (grids differing by a factor of two in spacing).
pub fn convergence_order(coarse_residual: f64, fine_residual: f64) -> f64 {
    (coarse_residual / fine_residual).log2()
}
