//! Gradient scalar solitons on the cone over a compact eta-Einstein Sasaki
//! manifold, with interval fixed to `(1, oo)`.
//!
//! The scalar soliton condition `S - c + Delta Q = 0` with `Q = mu sigma + c0`
//! reduces to
//!
//! ```text
//! (sigma^m phi)'' - mu (sigma^m phi)' = m kappa sigma^{m-1} - c sigma^m
//! ```
//!
//! whose first integral and closed-form solution are
//!
//! ```text
//! (sigma^m phi)' - mu sigma^m phi = kappa sigma^m - c sigma^{m+1}/(m+1) + c1,
//! phi(sigma) = -(kappa - c/mu) sum_{j=0}^m A_j sigma^{-j}/mu^{j+1}
//!              + c sigma/(mu(m+1)) - (c1/mu) sigma^{-m} + c2 e^{mu sigma} sigma^{-m}
//! ```
//!
//! with `A_j = m!/(m-j)!`. Completeness near `sigma = 1` forces
//! `phi(1) = phi'(1) = 0`, which pins `c1 = -kappa + c/(m+1)` and
//!
//! ```text
//! c2 = e^{-mu} ( kappa sum_{j=1}^m A_j mu^{-(j+1)} - c sum_{j=0}^m A_j mu^{-(j+2)} ).
//! ```
//!
//! The exponentials are combined as `e^{mu(sigma-1)}` before evaluation so
//! large `|mu|` stays in range. A scalar soliton is a Ricci soliton exactly
//! when `c1 = 0` and `2 lambda = -c/(m+1)`, i.e. `c = (m+1) kappa` with
//! `kappa = -2 lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::profile::{RadialProfile, MAX_M};

/// Falling-factorial coefficients `A_j = m!/(m-j)!` for `j = 0..=m`.
fn falling_factorials(m: u32) -> Vec<f64> {
    let mut a = Vec::with_capacity(m as usize + 1);
    a.push(1.0);
    for j in 1..=m {
        let last = *a.last().unwrap();
        a.push(last * f64::from(m - j + 1));
    }
    a
}

/// The two integration constants pinned by completeness at `sigma = 1`.
pub fn constants_c1_c2(m: u32, kappa: f64, c: f64, mu: f64) -> Result<(f64, f64)> {
    if mu == 0.0 {
        return Err(SolitonError::SteadyVectorFieldDegenerate);
    }
    if !(1..=MAX_M).contains(&m) {
        return Err(SolitonError::InvalidParameter(format!(
            "require 1 <= m <= {MAX_M}, got {m}"
        )));
    }
    let mf = f64::from(m);
    let c1 = -kappa + c / (mf + 1.0);
    let a = falling_factorials(m);
    let mut kappa_sum = 0.0;
    let mut c_sum = 0.0;
    let mut inv = 1.0 / mu; // mu^{-(j+1)} at the current j
    for (j, &aj) in a.iter().enumerate() {
        if j >= 1 {
            kappa_sum += aj * inv;
        }
        c_sum += aj * inv / mu;
        inv /= mu;
    }
    let braced = kappa * kappa_sum - c * c_sum;
    Ok((c1, (-mu).exp() * braced))
}

/// Evaluable scalar-soliton profile on `(1, oo)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarSolitonProfile {
    m: u32,
    kappa: f64,
    c: f64,
    mu: f64,
    c1: f64,
    /// `c2 e^{mu}` — the range-safe combination actually evaluated.
    b2: f64,
}

impl ScalarSolitonProfile {
    pub fn new(m: u32, kappa: f64, c: f64, mu: f64) -> Result<Self> {
        if !kappa.is_finite() || !c.is_finite() || !mu.is_finite() {
            return Err(SolitonError::InvalidParameter(
                "kappa, c, mu must be finite".into(),
            ));
        }
        let (c1, c2) = constants_c1_c2(m, kappa, c, mu)?;
        Ok(Self {
            m,
            kappa,
            c,
            mu,
            c1,
            b2: c2 * mu.exp(),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.b2 * (-self.mu).exp()
    }

    fn check_domain(&self, sigma: f64) -> Result<()> {
        if !(sigma >= 1.0) {
            return Err(SolitonError::OutOfDomain(format!(
                "scalar profile lives on [1, oo), got sigma = {sigma}"
            )));
        }
        Ok(())
    }

    /// Closed-form profile value.
    pub fn phi(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        let (m, kappa, c, mu) = (f64::from(self.m), self.kappa, self.c, self.mu);
        let a = falling_factorials(self.m);
        let mut series = 0.0;
        let mut inv = 1.0 / mu;
        let mut sig_pow = 1.0;
        for &aj in &a {
            series += aj * inv * sig_pow;
            inv /= mu;
            sig_pow /= sigma;
        }
        let sig_m = sigma.powi(-(self.m as i32));
        Ok(
            -(kappa - c / mu) * series + c * sigma / (mu * (m + 1.0)) - self.c1 / mu * sig_m
                + self.b2 * (mu * (sigma - 1.0)).exp() * sig_m,
        )
    }

    /// Analytic first derivative of the closed form.
    pub fn phi_prime(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        let (m, kappa, c, mu) = (f64::from(self.m), self.kappa, self.c, self.mu);
        let a = falling_factorials(self.m);
        let mut series = 0.0;
        let mut inv = 1.0 / mu;
        let mut sig_pow = 1.0 / sigma;
        for (j, &aj) in a.iter().enumerate() {
            if j >= 1 {
                series += aj * inv * (-(j as f64)) * sig_pow;
            }
            inv /= mu;
            sig_pow /= sigma;
        }
        let sig_m = sigma.powi(-(self.m as i32));
        Ok(-(kappa - c / mu) * series
            + c / (mu * (m + 1.0))
            + m * self.c1 / mu * sig_m / sigma
            + self.b2 * (mu * (sigma - 1.0)).exp() * sig_m * (mu - m / sigma))
    }

    /// Analytic second derivative of the closed form.
    pub fn phi_second(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        let (m, kappa, c, mu) = (f64::from(self.m), self.kappa, self.c, self.mu);
        let a = falling_factorials(self.m);
        let mut series = 0.0;
        let mut inv = 1.0 / mu;
        let mut sig_pow = 1.0 / (sigma * sigma);
        for (j, &aj) in a.iter().enumerate() {
            if j >= 1 {
                let jf = j as f64;
                series += aj * inv * jf * (jf + 1.0) * sig_pow;
            }
            inv /= mu;
            sig_pow /= sigma;
        }
        let sig_m = sigma.powi(-(self.m as i32));
        let e = self.b2 * (mu * (sigma - 1.0)).exp() * sig_m;
        Ok(
            -(kappa - c / mu) * series - m * (m + 1.0) * self.c1 / mu * sig_m / (sigma * sigma)
                + e * ((mu - m / sigma) * (mu - m / sigma) + m / (sigma * sigma)),
        )
    }

    /// Magnitude of the closed form's individual terms at `sigma`; `eps`
    /// times this bounds the attainable evaluation accuracy (small `|mu|`
    /// inflates `c2 ~ mu^{-(m+2)}` and the terms cancel near the boundary).
    pub fn evaluation_scale(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        let (m, kappa, c, mu) = (f64::from(self.m), self.kappa, self.c, self.mu);
        let a = falling_factorials(self.m);
        let mut series = 0.0;
        let mut inv = 1.0 / mu;
        let mut sig_pow = 1.0;
        for &aj in &a {
            series += (aj * inv * sig_pow).abs();
            inv /= mu;
            sig_pow /= sigma;
        }
        let sig_m = sigma.powi(-(self.m as i32));
        Ok((kappa - c / mu).abs() * series
            + (c * sigma / (mu * (m + 1.0))).abs()
            + (self.c1 / mu * sig_m).abs()
            + (self.b2 * (mu * (sigma - 1.0)).exp() * sig_m).abs())
    }

    /// Residual of the second-order soliton equation with both derivatives
    /// of `y = sigma^m phi` taken by five-point finite differences of the
    /// closed form (independent of the analytic derivatives), scaled by the
    /// local size of the right-hand side.
    pub fn ode_residual(&self, sigma: f64) -> Result<f64> {
        if !(sigma > 1.0) {
            return Err(SolitonError::OutOfDomain(format!(
                "residual requires sigma > 1, got {sigma}"
            )));
        }
        let m = self.m as i32;
        let y = |x: f64| -> Result<f64> { Ok(x.powi(m) * self.phi(x)?) };
        let h = (6e-3 * sigma.max(1.0)).min(0.45 * (sigma - 1.0).max(1e-3));
        let y2 = y(sigma + 2.0 * h)?;
        let y1 = y(sigma + h)?;
        let y0 = y(sigma)?;
        let ym1 = y(sigma - h)?;
        let ym2 = y(sigma - 2.0 * h)?;
        let d1 = (-y2 + 8.0 * y1 - 8.0 * ym1 + ym2) / (12.0 * h);
        let d2 = (-y2 + 16.0 * y1 - 30.0 * y0 + 16.0 * ym1 - ym2) / (12.0 * h * h);
        let mf = f64::from(self.m);
        let rhs = mf * self.kappa * sigma.powi(m - 1) - self.c * sigma.powi(m);
        let scale = 1.0 + rhs.abs() + (self.mu * d1).abs();
        Ok((d2 - self.mu * d1 - rhs) / scale)
    }

    /// First-integral residual `(sigma^m phi)' - mu sigma^m phi - rhs`,
    /// using the analytic derivative.
    pub fn first_integral_residual(&self, sigma: f64) -> Result<f64> {
        self.check_domain(sigma)?;
        let m = f64::from(self.m);
        let sig_m = sigma.powi(self.m as i32);
        let y = sig_m * self.phi(sigma)?;
        let dy = sig_m * (self.phi_prime(sigma)? + m * self.phi(sigma)? / sigma);
        let rhs = self.kappa * sig_m - self.c / (m + 1.0) * sig_m * sigma + self.c1;
        let scale = 1.0 + rhs.abs() + (self.mu * y).abs();
        Ok((dy - self.mu * y - rhs) / scale)
    }

    /// Positivity certificate on `(1, sigma_max]` under the completeness
    /// hypotheses `kappa - c/(m+1) >= 0`, `c < 0`, `mu < 0`: samples `phi`
    /// on a geometric grid and checks the defining differential inequality
    /// `(sigma^m phi)' - mu sigma^m phi >= -c (sigma - 1)/(m+1) > 0` at each
    /// point.
    pub fn positivity_certificate(&self, sigma_max: f64) -> Result<bool> {
        let m = f64::from(self.m);
        if !(self.kappa - self.c / (m + 1.0) >= 0.0) || !(self.c < 0.0) || !(self.mu < 0.0) {
            return Err(SolitonError::InvalidParameter(format!(
                "certificate hypotheses need kappa - c/(m+1) >= 0, c < 0, mu < 0; \
                 got kappa = {}, c = {}, mu = {}",
                self.kappa, self.c, self.mu
            )));
        }
        if !(sigma_max > 1.0) {
            return Err(SolitonError::InvalidParameter(
                "sigma_max must exceed 1".into(),
            ));
        }
        let n = 600;
        let ratio = ((sigma_max - 1.0) / 1e-6).powf(1.0 / (n as f64 - 1.0));
        let mut tau = 1e-6;
        for _ in 0..n {
            let sigma = 1.0 + tau;
            let phi = self.phi(sigma)?;
            if !(phi > 0.0) {
                return Ok(false);
            }
            let sig_m = sigma.powi(self.m as i32);
            let lhs = sig_m * (self.phi_prime(sigma)? + m * phi / sigma) - self.mu * sig_m * phi;
            let bound = -self.c / (m + 1.0) * (sigma - 1.0);
            if lhs < bound * (1.0 - 1e-9) - 1e-12 {
                return Ok(false);
            }
            tau *= ratio;
        }
        Ok(true)
    }
}

impl RadialProfile for ScalarSolitonProfile {
    fn transverse_dim(&self) -> u32 {
        self.m
    }

    fn einstein_constant(&self) -> f64 {
        self.kappa
    }

    fn interval(&self) -> (f64, f64) {
        (1.0, f64::INFINITY)
    }

    fn phi(&self, sigma: f64) -> Result<f64> {
        ScalarSolitonProfile::phi(self, sigma)
    }

    fn phi_d1(&self, sigma: f64) -> Result<f64> {
        self.phi_prime(sigma)
    }

    fn phi_d2(&self, sigma: f64) -> Result<f64> {
        self.phi_second(sigma)
    }
}

/// Radial Laplacian `Delta u = (m/sigma) u' phi + (u' phi)'`, evaluated from
/// the point values `u'(sigma)` and `u''(sigma)`.
pub fn laplacian_radial<P: RadialProfile>(pr: &P, du: f64, d2u: f64, sigma: f64) -> Result<f64> {
    let (a, b) = pr.interval();
    if !(sigma > a && sigma < b) {
        return Err(SolitonError::OutOfDomain(format!(
            "sigma = {sigma} outside ({a}, {b})"
        )));
    }
    let m = f64::from(pr.transverse_dim());
    let phi = pr.phi(sigma)?;
    let dphi = pr.phi_d1(sigma)?;
    Ok(m / sigma * du * phi + d2u * phi + du * dphi)
}

/// Scalar curvature of the ansatz metric,
/// `S = kappa m / sigma - (sigma^m phi)'' / sigma^m`, with the second
/// derivative expanded analytically.
pub fn scalar_curvature<P: RadialProfile>(pr: &P, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(SolitonError::OutOfDomain(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let m = f64::from(pr.transverse_dim());
    let kappa = pr.einstein_constant();
    let phi = pr.phi(sigma)?;
    let d1 = pr.phi_d1(sigma)?;
    let d2 = pr.phi_d2(sigma)?;
    // (sigma^m phi)'' / sigma^m = phi'' + 2m phi'/sigma + m(m-1) phi/sigma^2
    Ok(kappa * m / sigma - d2 - 2.0 * m * d1 / sigma - m * (m - 1.0) * phi / (sigma * sigma))
}

/// Ricci specialization of the scalar soliton family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciSpecialization {
    pub c: f64,
    pub lambda: f64,
    /// Whether the parameters fall in the complete expanding regime
    /// (`kappa < 0`, hence `lambda = +1`).
    pub expanding_complete: bool,
}

/// A gradient scalar soliton is a gradient Ricci soliton exactly when
/// `c1 = 0` and `2 lambda = -c/(m+1)`, i.e. `c = (m+1) kappa` with
/// `kappa = -2 lambda in {-2, 2}`.
pub fn ricci_specialize(m: u32, kappa: f64) -> Result<RicciSpecialization> {
    let lambda = -kappa / 2.0;
    if (lambda - 1.0).abs() > 1e-12 && (lambda + 1.0).abs() > 1e-12 {
        return Err(SolitonError::InvalidParameter(format!(
            "Ricci specialization needs kappa = -2 or kappa = 2, got {kappa}"
        )));
    }
    let lambda = lambda.round();
    Ok(RicciSpecialization {
        c: (f64::from(m) + 1.0) * kappa,
        lambda,
        expanding_complete: kappa < 0.0,
    })
}
