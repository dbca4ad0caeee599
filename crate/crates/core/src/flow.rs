//! Self-similar flows, their `t -> 0` cone limits, and the gluing of a
//! shrinking and an expanding soliton into one eternal flow.
//!
//! A soliton with sign `lambda = +1` generates a flow on `t > 0` equal to
//! the soliton metric at `t = 1`; with `lambda = -1` a flow on `t < 0` equal
//! to it at `t = -1`. In the radial potential `P(s) = s + F(s)` the flow is
//!
//! ```text
//! lambda = +1:  t P(s + (mu/2) ln t)
//! lambda = -1: (-t) P(s - (mu/2) ln(-t))
//! ```
//!
//! and both converge as `t -> 0` to the aperture-cone potential
//! `C r^{2q}/(2q)` with `q = -1/mu` (expanding) or `q = 1/mu` (shrinking).
//! Matching the two amplitudes by an `s`-translation of the expanding side
//! produces an eternal flow across `t = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::mu_solver::{solve_mu, MuRootCertificate};
use crate::profile::SolitonProfile;
use crate::radial::{
    asymptotic_coefficient, integrate_sigma, propagate_sigma, reconstruct_potential, RadialSolution,
};
use crate::sasaki::{ConeAperture, LineBundleData};

/// A soliton interpreted as a self-similar Kähler-Ricci flow.
#[derive(Debug, Clone, Copy)]
pub struct SelfSimilarFlow {
    profile: SolitonProfile,
}

impl SelfSimilarFlow {
    pub fn new(profile: SolitonProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }

    /// Existence interval of the flow: `(0, oo)` expanding, `(-oo, 0)`
    /// shrinking, all of `R` steady.
    pub fn time_domain(&self) -> (f64, f64) {
        match self.profile.lambda() {
            l if l > 0.0 => (0.0, f64::INFINITY),
            l if l < 0.0 => (f64::NEG_INFINITY, 0.0),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Radial Kähler potential of the flow at time `t` and radius `r`,
    /// evaluated from a sampled solution (whose window must contain the
    /// shifted argument; no extrapolation is performed).
    pub fn potential(&self, sol: &RadialSolution, t: f64, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(SolitonError::OutOfDomain(format!(
                "r must be positive, got {r}"
            )));
        }
        let (t_lo, t_hi) = self.time_domain();
        if !(t > t_lo && t < t_hi) {
            return Err(SolitonError::OutOfDomain(format!(
                "t = {t} outside the flow domain ({t_lo}, {t_hi})"
            )));
        }
        let s = r.ln();
        let lambda = self.profile.lambda();
        let mu = self.profile.mu();
        if lambda > 0.0 {
            Ok(t * sol.potential_at(s + 0.5 * mu * t.ln())?)
        } else if lambda < 0.0 {
            Ok(-t * sol.potential_at(s - 0.5 * mu * (-t).ln())?)
        } else {
            sol.potential_at(s)
        }
    }
}

/// Extract the `t -> 0` aperture cone of a self-similar flow: amplitude from
/// the tail coefficient of `sigma(s)`, exponent `q = 1/|mu|`.
pub fn cone_limit(fl: &SelfSimilarFlow, sol: &RadialSolution) -> Result<ConeAperture> {
    let mu = fl.profile.mu();
    let lambda = fl.profile.lambda();
    if lambda > 0.0 && !(mu < 0.0) {
        return Err(SolitonError::InvalidParameter(
            "an expanding flow converges to a cone only for mu < 0".into(),
        ));
    }
    if lambda < 0.0 && !(mu > 0.0) {
        return Err(SolitonError::InvalidParameter(
            "a shrinking flow converges to a cone only for mu > 0".into(),
        ));
    }
    let amplitude = asymptotic_coefficient(sol, mu)?;
    ConeAperture::new(amplitude, 1.0 / mu.abs())
}

/// A shrinking flow on `t < 0` and an expanding flow on `t > 0` sharing one
/// aperture cone at `t = 0`.
#[derive(Debug, Clone)]
pub struct EternalSolution {
    shrinking: SelfSimilarFlow,
    expanding: SelfSimilarFlow,
    shrink_sol: RadialSolution,
    expand_sol: RadialSolution,
    aperture: ConeAperture,
    translation: f64,
    amplitude_mismatch: f64,
    mu_certificate: MuRootCertificate,
}

/// Serializable summary of an eternal solution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EternalSummary {
    pub q: f64,
    pub amplitude: f64,
    pub mu_shrink: f64,
    pub mu_expand: f64,
    pub translation: f64,
    pub continuity_error: f64,
}

impl EternalSolution {
    pub fn shrinking(&self) -> &SelfSimilarFlow {
        &self.shrinking
    }

    pub fn expanding(&self) -> &SelfSimilarFlow {
        &self.expanding
    }

    pub fn shrink_solution(&self) -> &RadialSolution {
        &self.shrink_sol
    }

    pub fn expand_solution(&self) -> &RadialSolution {
        &self.expand_sol
    }

    pub fn aperture(&self) -> &ConeAperture {
        &self.aperture
    }

    /// `s`-translation applied to the expanding side to match amplitudes.
    pub fn translation(&self) -> f64 {
        self.translation
    }

    /// Relative amplitude defect after translation, re-measured by an
    /// independent tail extrapolation of the translated solution.
    pub fn amplitude_mismatch(&self) -> f64 {
        self.amplitude_mismatch
    }

    pub fn mu_certificate(&self) -> &MuRootCertificate {
        &self.mu_certificate
    }

    /// Two-sided `t -> 0` continuity defect on `r in [e^{-2}, e^2]`.
    ///
    /// Radial Kähler potentials are defined modulo additive constants (the
    /// metric is `i ddbar P`), so each side's gap to the aperture potential
    /// is compared after removing its mean over the radius grid; the
    /// constant being removed vanishes like `t ln t` anyway.
    pub fn continuity_error(&self, t_eps: f64, n_r: usize) -> Result<f64> {
        if !(t_eps > 0.0) || n_r < 2 {
            return Err(SolitonError::InvalidParameter(
                "continuity check needs t_eps > 0 and at least 2 radii".into(),
            ));
        }
        let sides: [(&SelfSimilarFlow, &RadialSolution, f64); 2] = [
            (&self.shrinking, &self.shrink_sol, -t_eps),
            (&self.expanding, &self.expand_sol, t_eps),
        ];
        let mut worst: f64 = 0.0;
        for (flow, sol, t) in sides {
            worst = worst.max(potential_gap(flow, sol, &self.aperture, t, n_r)?);
        }
        Ok(worst)
    }

    pub fn summary(&self, continuity_error: f64) -> EternalSummary {
        EternalSummary {
            q: self.aperture.exponent(),
            amplitude: self.aperture.amplitude(),
            mu_shrink: self.shrinking.profile().mu(),
            mu_expand: self.expanding.profile().mu(),
            translation: self.translation,
            continuity_error,
        }
    }
}

/// Mean-centered gap between a flow potential at time `t` and an aperture
/// cone potential over the grid `r = e^s`, `s` uniform in `[-2, 2]`.
pub fn potential_gap(
    flow: &SelfSimilarFlow,
    sol: &RadialSolution,
    aperture: &ConeAperture,
    t: f64,
    n_r: usize,
) -> Result<f64> {
    let mut gaps = Vec::with_capacity(n_r);
    for i in 0..n_r {
        let s = -2.0 + 4.0 * i as f64 / (n_r as f64 - 1.0);
        let r = s.exp();
        gaps.push(flow.potential(sol, t, r)? - aperture.potential(r)?);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Ok(gaps.iter().map(|g| (g - mean).abs()).fold(0.0, f64::max))
}

/// Samples per unit of `s` used for the glued radial solutions.
const GLUE_DENSITY: f64 = 200.0;

fn glue_window(mu_abs: f64) -> (f64, f64, usize) {
    // the continuity check at |t| = 1e-6 shifts s by (|mu|/2) ln(1e-6)
    let shift = 0.5 * mu_abs * 1.0e-6f64.ln().abs();
    let s_min = -(4.0 + mu_abs);
    let s_max = shift + 3.5;
    let n = ((s_max - s_min) * GLUE_DENSITY).ceil() as usize + 1;
    (s_min, s_max, n)
}

/// Glue the shrinking soliton of `L^{-k}` (demanding `0 < k < p`) to the
/// expanding cone soliton with the same `kappa = 2p/k` and opposite `mu`,
/// translating the expanding side so both `t -> 0` amplitudes agree.
pub fn glue_eternal(m: u32, p: u32, k: u32) -> Result<EternalSolution> {
    let bundle = LineBundleData::new(p, k)?;
    if !(k < p) {
        return Err(SolitonError::InvalidParameter(format!(
            "gluing requires 0 < k < p (shrinking side admissibility), got p = {p}, k = {k}"
        )));
    }
    let kappa = bundle.kappa();
    let a = kappa / 2.0 - 1.0;

    let cert = solve_mu(m, kappa, a)?;
    let mu_s = cert.root;
    let shrink_profile = SolitonProfile::new(m, kappa, -1.0, mu_s, 0.0, a, f64::INFINITY)?;
    let boundary = shrink_profile.phi(a)?.abs();
    if boundary > 1e-10 * (1.0 + kappa) {
        return Err(SolitonError::VerificationFailure(format!(
            "shrinking profile fails its boundary condition: phi(a) = {boundary:.3e}"
        )));
    }

    let mu_e = -mu_s;
    let expand_profile = SolitonProfile::cone(m, kappa, 1.0, mu_e)?;

    let (s_min, s_max, n) = glue_window(mu_s);
    let shrink_sol =
        reconstruct_potential(&integrate_sigma(&shrink_profile, a + 1.0, s_min, s_max, n)?)?;
    let expand_raw =
        reconstruct_potential(&integrate_sigma(&expand_profile, 1.0, s_min, s_max, n)?)?;

    let d0 = asymptotic_coefficient(&shrink_sol, mu_s)?;
    let e0_raw = asymptotic_coefficient(&expand_raw, mu_e)?;

    // sigma_e(s + delta) has tail coefficient E0 e^{-2 delta / mu_e}
    let translation = -0.5 * mu_e * (d0 / e0_raw).ln();
    let sigma0_shifted = propagate_sigma(&expand_profile, 1.0, translation)?;
    let expand_sol = reconstruct_potential(&integrate_sigma(
        &expand_profile,
        sigma0_shifted,
        s_min,
        s_max,
        n,
    )?)?;
    let e0 = asymptotic_coefficient(&expand_sol, mu_e)?;

    let mismatch = ((e0 - d0) / d0).abs();
    if mismatch > 1e-8 {
        return Err(SolitonError::VerificationFailure(format!(
            "aperture amplitudes disagree after translation: |E0 - D0|/D0 = {mismatch:.3e}"
        )));
    }

    let aperture = ConeAperture::new(d0, 1.0 / mu_s)?;
    Ok(EternalSolution {
        shrinking: SelfSimilarFlow::new(shrink_profile),
        expanding: SelfSimilarFlow::new(expand_profile),
        shrink_sol,
        expand_sol,
        aperture,
        translation,
        amplitude_mismatch: mismatch,
        mu_certificate: cert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn linear_flow() -> (SelfSimilarFlow, RadialSolution) {
        let pr = SolitonProfile::cone(1, 4.0, 1.0, -1.0).unwrap();
        let sol =
            reconstruct_potential(&integrate_sigma(&pr, 1.0, -2.0, 2.0, 4001).unwrap()).unwrap();
        (SelfSimilarFlow::new(pr), sol)
    }

    #[test]
    fn flow_equals_soliton_at_unit_time() {
        let (fl, sol) = linear_flow();
        for r in [0.5, 1.0, 2.0] {
            let p = fl.potential(&sol, 1.0, r).unwrap();
            let direct = sol.potential_at(r.ln()).unwrap();
            assert!((p - direct).abs() < 1e-14);
        }
        // and the time domain excludes t <= 0
        assert!(fl.potential(&sol, -1.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_cone_is_a_fixed_point() {
        // the linear profile generates a stationary flow: potential
        // differences between radii are t-independent
        let (fl, sol) = linear_flow();
        let base: Vec<f64> = [0.6, 1.0, 1.7]
            .iter()
            .map(|&r| fl.potential(&sol, 1.0, r).unwrap())
            .collect();
        for t in [0.4, 0.9, 1.6, 2.4] {
            let cur: Vec<f64> = [0.6, 1.0, 1.7]
                .iter()
                .map(|&r| fl.potential(&sol, t, r).unwrap())
                .collect();
            for i in 1..cur.len() {
                let want = base[i] - base[0];
                let got = cur[i] - cur[0];
                assert!(
                    (got - want).abs() < 1e-12,
                    "t = {t}: difference {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn cone_limit_of_linear_profile() {
        let (fl, sol) = linear_flow();
        let aperture = cone_limit(&fl, &sol).unwrap();
        assert!((aperture.amplitude() - 1.0).abs() < 1e-9);
        assert!((aperture.exponent() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn glue_unit_case() {
        let eternal = glue_eternal(1, 2, 1).unwrap();
        assert!((eternal.mu_certificate().root - SQRT2).abs() < 1e-12);
        assert!((eternal.aperture().exponent() - 1.0 / SQRT2).abs() < 1e-12);
        assert!(eternal.amplitude_mismatch() <= 1e-8);
        let err = eternal.continuity_error(1e-6, 21).unwrap();
        assert!(err <= 1e-5, "continuity error {err:.3e}");
    }

    #[test]
    fn shrinking_flow_equals_soliton_at_minus_one() {
        let eternal = glue_eternal(1, 2, 1).unwrap();
        let flow = eternal.shrinking();
        let sol = eternal.shrink_solution();
        for r in [0.5, 1.0, 2.0] {
            let p = flow.potential(sol, -1.0, r).unwrap();
            let direct = sol.potential_at(r.ln()).unwrap();
            assert!((p - direct).abs() < 1e-13);
        }
        assert!(flow.potential(sol, 1.0, 1.0).is_err());
    }

    #[test]
    fn glue_rejects_inadmissible_bundles() {
        assert!(glue_eternal(1, 1, 1).is_err());
        assert!(glue_eternal(1, 1, 2).is_err());
    }

    #[test]
    fn translation_covariance_of_the_amplitude() {
        // shifting s by delta multiplies the tail coefficient by e^{-2 delta/mu}
        let pr = SolitonProfile::cone(1, 4.0, 1.0, -SQRT2).unwrap();
        let sol0 =
            reconstruct_potential(&integrate_sigma(&pr, 1.0, -3.0, 10.0, 2001).unwrap()).unwrap();
        let c0 = asymptotic_coefficient(&sol0, -SQRT2).unwrap();
        let delta = 0.35;
        let shifted0 = propagate_sigma(&pr, 1.0, delta).unwrap();
        let sol1 =
            reconstruct_potential(&integrate_sigma(&pr, shifted0, -3.0, 10.0, 2001).unwrap())
                .unwrap();
        let c1 = asymptotic_coefficient(&sol1, -SQRT2).unwrap();
        let expected = c0 * (2.0 * delta / SQRT2).exp();
        assert!(
            ((c1 - expected) / expected).abs() < 1e-8,
            "{c1} vs {expected}"
        );
    }
}
