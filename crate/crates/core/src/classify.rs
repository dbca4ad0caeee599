//! Endpoint classification: complete ends, smooth compactification onto the
//! zero section of a line bundle, finite-distance singular points, and
//! bundle admissibility.
//!
//! The dichotomy is driven by the vanishing order of `phi` at a finite
//! endpoint (order two or more puts the endpoint at infinite distance) and
//! by the growth exponent at an infinite one (at most quadratic growth keeps
//! the end complete). Smooth extension onto the zero section additionally
//! requires `phi(a) = 0` with slope exactly 2.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};
use crate::profile::{zero_slope, SolitonProfile};
use crate::quad::power_law_order;

/// Which endpoint of the interval a verdict concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    LeftA,
    RightB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    /// Infinite distance: `phi` vanishes at least to second order.
    CompleteEnd,
    /// `phi(a) = 0`, `phi'(a) = 2`, growth at most quadratic: the metric
    /// closes up smoothly over the zero section.
    SmoothZeroSection,
    /// The endpoint is at finite distance (cone tip or genuine singularity).
    FiniteDistanceSingular,
    /// `b = oo` with at most quadratic growth.
    UnboundedComplete,
}

/// Classification result for one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointVerdict {
    pub endpoint: Endpoint,
    pub kind: EndpointKind,
    /// Vanishing order at a finite endpoint, growth exponent at an infinite
    /// one (log-log estimate; infinite for exponential growth).
    #[serde(with = "nullable_f64")]
    pub vanishing_order: f64,
    /// `phi'` at the endpoint when finite, `NaN` otherwise.
    #[serde(with = "nullable_f64")]
    pub slope: f64,
}

/// JSON has no NaN or infinities; non-finite entries serialize as `null`
/// and come back as `NaN`.
mod nullable_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Admissibility of a line-bundle compactification for a soliton sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleAdmissibility {
    pub p: u32,
    pub k: u32,
    pub lambda: f64,
    /// Required left endpoint `a = lambda (1 - p/k)`.
    pub a_required: f64,
    pub admissible: bool,
}

const ORDER_BAND: f64 = 1e-2;
const SLOPE_TOL: f64 = 1e-8;

fn boundary_zero_tol(pr: &SolitonProfile) -> f64 {
    1e-10 * (1.0 + pr.kappa().abs())
}

/// Locate all zeros of `phi` on `(0, sigma_max]`, reporting each with its
/// analytic slope `kappa + 2 lambda sigma0`. Sign changes are refined by
/// bisection; touch zeros (double zeros, no sign change) are caught by the
/// boundary-tolerance test on grid minima and at the declared endpoint.
pub fn zero_structure(pr: &SolitonProfile, sigma_max: f64) -> Result<Vec<(f64, f64)>> {
    if !(sigma_max > pr.a()) {
        return Err(SolitonError::InvalidParameter(format!(
            "sigma_max = {sigma_max} must exceed the left endpoint {}",
            pr.a()
        )));
    }
    let tol = boundary_zero_tol(pr);
    let mut zeros: Vec<f64> = Vec::new();
    let push = |z: f64, zeros: &mut Vec<f64>| {
        if !zeros
            .iter()
            .any(|&w| (w - z).abs() <= 1e-7 * (1.0 + z.abs()))
        {
            zeros.push(z);
        }
    };

    // seed with the declared endpoints when they carry zeros
    if pr.a() > 0.0 && pr.phi(pr.a())?.abs() <= tol {
        push(pr.a(), &mut zeros);
    }
    if pr.b().is_finite() && pr.b() <= sigma_max && pr.phi(pr.b())?.abs() <= tol {
        push(pr.b(), &mut zeros);
    }

    // geometric scan
    let lo: f64 = 1e-6_f64.min(pr.a().max(1e-12));
    let n = 4000;
    let ratio = (sigma_max / lo).powf(1.0 / n as f64);
    let mut x_prev = lo;
    let mut v_prev = pr.phi(x_prev)?;
    let mut x = lo;
    for _ in 0..n {
        x *= ratio;
        let v = pr.phi(x)?;
        if v_prev == 0.0 {
            push(x_prev, &mut zeros);
        } else if v_prev * v < 0.0 {
            // bisection refinement
            let (mut lo_x, mut hi_x, mut lo_v) = (x_prev, x, v_prev);
            for _ in 0..200 {
                let mid = 0.5 * (lo_x + hi_x);
                let mv = pr.phi(mid)?;
                if mv == 0.0 {
                    lo_x = mid;
                    hi_x = mid;
                    break;
                }
                if (mv > 0.0) == (lo_v > 0.0) {
                    lo_x = mid;
                    lo_v = mv;
                } else {
                    hi_x = mid;
                }
                if hi_x - lo_x <= 1e-14 * hi_x {
                    break;
                }
            }
            push(0.5 * (lo_x + hi_x), &mut zeros);
        } else if v.abs() <= tol && v.abs() <= v_prev.abs() {
            // potential touch zero: confirm with the analytic slope
            if zero_slope(pr.kappa(), pr.lambda(), x).abs() <= 1e-4 * (1.0 + pr.kappa().abs()) {
                push(x, &mut zeros);
            }
        }
        x_prev = x;
        v_prev = v;
    }

    zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(zeros
        .into_iter()
        .map(|z| (z, zero_slope(pr.kappa(), pr.lambda(), z)))
        .collect())
}

/// Analytic growth exponent of `phi` as `sigma -> oo`: exponential when the
/// homogeneous term survives with `mu > 0`, otherwise the degree of the
/// dominant polynomial term.
pub fn growth_exponent_analytic(pr: &SolitonProfile) -> f64 {
    if pr.nu() != 0.0 && pr.mu() > 0.0 {
        f64::INFINITY
    } else if pr.lambda() != 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Numeric growth exponent from a log-log fit over `[1e3, 1e5]`.
pub fn growth_exponent_numeric(pr: &SolitonProfile) -> Result<f64> {
    power_law_order(|t| Ok(pr.phi(1.0e3 * t)?.abs()), 1.0, 100.0, 17)
}

fn vanishing_order_at(pr: &SolitonProfile, endpoint: f64, toward_right: bool) -> Result<f64> {
    let sign = if toward_right { 1.0 } else { -1.0 };
    power_law_order(|t| Ok(pr.phi(endpoint + sign * t)?.abs()), 1e-8, 1e-2, 25)
}

fn left_verdict(pr: &SolitonProfile) -> Result<EndpointVerdict> {
    let a = pr.a();
    if a == 0.0 {
        // cone-apex regime: never a zero-section compactification
        let order = power_law_order(|t| Ok(pr.phi(t)?.abs()), 1e-8, 1e-2, 25)?;
        let kind = if order >= 2.0 - ORDER_BAND {
            EndpointKind::CompleteEnd
        } else {
            EndpointKind::FiniteDistanceSingular
        };
        return Ok(EndpointVerdict {
            endpoint: Endpoint::LeftA,
            kind,
            vanishing_order: order,
            slope: zero_slope(pr.kappa(), pr.lambda(), 0.0),
        });
    }
    let order = vanishing_order_at(pr, a, true)?;
    let slope = pr.phi_prime(a)?;
    let kind = if order >= 2.0 - ORDER_BAND {
        EndpointKind::CompleteEnd
    } else if pr.phi(a)?.abs() <= boundary_zero_tol(pr)
        && (slope - 2.0).abs() <= SLOPE_TOL
        && growth_exponent_analytic(pr) <= 2.0 + ORDER_BAND
    {
        EndpointKind::SmoothZeroSection
    } else {
        EndpointKind::FiniteDistanceSingular
    };
    Ok(EndpointVerdict {
        endpoint: Endpoint::LeftA,
        kind,
        vanishing_order: order,
        slope,
    })
}

fn right_verdict(pr: &SolitonProfile) -> Result<EndpointVerdict> {
    let b = pr.b();
    if b.is_finite() {
        let order = vanishing_order_at(pr, b, false)?;
        let kind = if order >= 2.0 - ORDER_BAND {
            EndpointKind::CompleteEnd
        } else {
            EndpointKind::FiniteDistanceSingular
        };
        return Ok(EndpointVerdict {
            endpoint: Endpoint::RightB,
            kind,
            vanishing_order: order,
            slope: pr.phi_prime(b)?,
        });
    }
    let analytic = growth_exponent_analytic(pr);
    let exponent = if analytic.is_finite() {
        // the numeric fit cross-checks the analytic degree
        let numeric = growth_exponent_numeric(pr)?;
        if (numeric - analytic).abs() > 0.1 {
            return Err(SolitonError::VerificationFailure(format!(
                "growth exponent mismatch: analytic {analytic}, fitted {numeric}"
            )));
        }
        analytic
    } else {
        analytic
    };
    let kind = if exponent <= 2.0 + ORDER_BAND {
        EndpointKind::UnboundedComplete
    } else {
        EndpointKind::FiniteDistanceSingular
    };
    Ok(EndpointVerdict {
        endpoint: Endpoint::RightB,
        kind,
        vanishing_order: exponent,
        slope: f64::NAN,
    })
}

/// Per-endpoint completeness verdicts. Profiles with an interior sign
/// change of `phi` (a zero strictly inside `(a, b)`) are rejected: they
/// violate metric positivity and the completeness dichotomy does not apply.
pub fn completeness_report(pr: &SolitonProfile) -> Result<(EndpointVerdict, EndpointVerdict)> {
    let scan_hi = if pr.b().is_finite() { pr.b() } else { 1.0e4 };
    let interior = zero_structure(pr, scan_hi)?;
    for &(z, _) in &interior {
        let inside = z > pr.a() + 1e-7 * (1.0 + pr.a()) && z < scan_hi * (1.0 - 1e-12);
        let at_b = pr.b().is_finite() && (z - pr.b()).abs() <= 1e-7 * (1.0 + pr.b());
        if inside && !at_b {
            return Err(SolitonError::InvalidParameter(format!(
                "phi has an interior zero at sigma = {z}; the profile violates positivity"
            )));
        }
    }
    Ok((left_verdict(pr)?, right_verdict(pr)?))
}

/// Zero-section extension test for the left endpoint: `phi(a) = 0`,
/// `phi'(a) = 2`, and at most quadratic growth. `a = 0` profiles are the
/// cone-apex regime and never extend.
pub fn extension_check(pr: &SolitonProfile) -> Result<EndpointVerdict> {
    left_verdict(pr)
}

/// Which soliton sign (if any) compactifies `L^{-k}` over a base with
/// `K_M = L^{-p}`: the required endpoint is `a = lambda (1 - p/k)`, positive
/// exactly when `lambda = -1, k < p` (shrinking) or `lambda = +1, k > p`
/// (expanding).
pub fn bundle_admissibility(p: u32, k: u32, lambda: f64) -> Result<BundleAdmissibility> {
    if p < 1 || k < 1 {
        return Err(SolitonError::InvalidParameter(
            "bundle data requires p >= 1 and k >= 1".into(),
        ));
    }
    if lambda != -1.0 && lambda != 1.0 {
        return Err(SolitonError::InvalidParameter(format!(
            "extension requires lambda = -1 or +1, got {lambda}"
        )));
    }
    let a_required = lambda * (1.0 - f64::from(p) / f64::from(k));
    let admissible = (lambda == -1.0 && k < p) || (lambda == 1.0 && k > p);
    Ok(BundleAdmissibility {
        p,
        k,
        lambda,
        a_required,
        admissible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mu_solver::solve_mu;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn expanding_cone_has_no_positive_zero() {
        let pr = SolitonProfile::cone(1, 4.0, 1.0, -1.5).unwrap();
        let zeros = zero_structure(&pr, 1.0e6).unwrap();
        assert!(zeros.is_empty(), "unexpected zeros: {zeros:?}");
    }

    #[test]
    fn shrinking_zeros_bracket_half_kappa() {
        // generic shrinking profile with a simple zero at a < kappa/2: the
        // second zero (if any within range) sits at or beyond kappa/2
        let pr = SolitonProfile::with_boundary(1, 4.0, -1.0, 0.3, 1.0, f64::INFINITY).unwrap();
        let zeros = zero_structure(&pr, 1.0e3).unwrap();
        assert!(!zeros.is_empty());
        assert!((zeros[0].0 - 1.0).abs() < 1e-9);
        assert!((zeros[0].1 - 2.0).abs() < 1e-12); // kappa - 2a = 2
        for &(z, _) in &zeros[1..] {
            assert!(z >= 2.0 - 1e-9, "second zero at {z}");
        }
    }

    #[test]
    fn double_zero_detected_with_zero_slope() {
        // lambda = +1, kappa = -2, a = 1: slope kappa + 2a = 0, order two
        let pr = SolitonProfile::with_boundary(1, -2.0, 1.0, -1.0, 1.0, f64::INFINITY).unwrap();
        let zeros = zero_structure(&pr, 100.0).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].0 - 1.0).abs() < 1e-9);
        assert!(zeros[0].1.abs() < 1e-12);
    }

    #[test]
    fn linear_profile_completeness() {
        let pr = SolitonProfile::cone(1, 4.0, 1.0, -1.0).unwrap();
        let (left, right) = completeness_report(&pr).unwrap();
        assert_eq!(left.kind, EndpointKind::FiniteDistanceSingular);
        assert!((left.vanishing_order - 1.0).abs() < 0.01);
        assert_eq!(right.kind, EndpointKind::UnboundedComplete);
        assert!((right.vanishing_order - 1.0).abs() < 0.01);
    }

    #[test]
    fn double_zero_profile_is_complete_on_the_left() {
        let pr = SolitonProfile::with_boundary(1, -2.0, 1.0, -1.0, 1.0, f64::INFINITY).unwrap();
        let (left, right) = completeness_report(&pr).unwrap();
        assert_eq!(left.kind, EndpointKind::CompleteEnd);
        assert!((left.vanishing_order - 2.0).abs() < 0.02);
        assert_eq!(right.kind, EndpointKind::UnboundedComplete);
    }

    #[test]
    fn shrinking_pipeline_extends_smoothly() {
        // (p, k) = (2, 1): kappa = 4, a = 1, mu = sqrt(2)
        let cert = solve_mu(1, 4.0, 1.0).unwrap();
        let pr = SolitonProfile::new(1, 4.0, -1.0, cert.root, 0.0, 1.0, f64::INFINITY).unwrap();
        let verdict = extension_check(&pr).unwrap();
        assert_eq!(verdict.kind, EndpointKind::SmoothZeroSection);
        assert!((verdict.slope - 2.0).abs() < 1e-10);
        let _ = SQRT2;
    }

    #[test]
    fn expanding_bundle_extends_smoothly() {
        // (p, k) = (1, 2): kappa = 1, a = 1/2, slope kappa + 2a = 2
        let pr = SolitonProfile::with_boundary(1, 1.0, 1.0, -1.0, 0.5, f64::INFINITY).unwrap();
        let verdict = extension_check(&pr).unwrap();
        assert_eq!(verdict.kind, EndpointKind::SmoothZeroSection);
        assert!((verdict.slope - 2.0).abs() < 1e-10);
        // linear growth (phi ~ -2 sigma/mu) keeps the far end complete
        let (_, right) = completeness_report(&pr).unwrap();
        assert_eq!(right.kind, EndpointKind::UnboundedComplete);
        assert!((right.vanishing_order - 1.0).abs() < 0.02);
    }

    #[test]
    fn wrong_endpoint_is_not_smooth() {
        // shrinking with a != kappa/2 - 1: slope differs from 2
        let pr = SolitonProfile::with_boundary(1, 4.0, -1.0, 1.2, 0.5, f64::INFINITY).unwrap();
        let verdict = extension_check(&pr).unwrap();
        assert_ne!(verdict.kind, EndpointKind::SmoothZeroSection);
        assert!((verdict.slope - 3.0).abs() < 1e-9); // kappa - 2a = 3
    }

    #[test]
    fn admissibility_table() {
        let b = bundle_admissibility(2, 1, -1.0).unwrap();
        assert!(b.admissible);
        assert_eq!(b.a_required, 1.0);
        let b = bundle_admissibility(1, 2, 1.0).unwrap();
        assert!(b.admissible);
        assert_eq!(b.a_required, 0.5);
        for lambda in [-1.0, 1.0] {
            let b = bundle_admissibility(2, 2, lambda).unwrap();
            assert!(!b.admissible);
            assert_eq!(b.a_required, 0.0);
        }
        assert!(bundle_admissibility(2, 1, 0.0).is_err());
    }

    #[test]
    fn admissibility_trichotomy() {
        for p in 1..=6u32 {
            for k in 1..=6u32 {
                let shrink = bundle_admissibility(p, k, -1.0).unwrap().admissible;
                let expand = bundle_admissibility(p, k, 1.0).unwrap().admissible;
                if p == k {
                    assert!(!shrink && !expand);
                } else {
                    assert!(shrink != expand);
                }
            }
        }
    }

    #[test]
    fn expanding_zero_location_is_recorded_not_assumed() {
        // bundle-admissible expanding profiles have their zero at
        // a = 1 - p/k < 1 structurally ...
        for (p, k) in [(1u32, 2u32), (1, 3), (2, 3), (3, 5)] {
            let a = 1.0 - f64::from(p) / f64::from(k);
            let kappa = 2.0 * f64::from(p) / f64::from(k);
            let pr = SolitonProfile::with_boundary(1, kappa, 1.0, -1.0, a, f64::INFINITY).unwrap();
            let zeros = zero_structure(&pr, 100.0).unwrap();
            assert_eq!(zeros.len(), 1);
            assert!(zeros[0].0 < 1.0, "zero at {}", zeros[0].0);
        }
        // ... but the ODE family as such admits lambda = +1 zeros beyond 1,
        // so the location is reported rather than presumed
        let pr = SolitonProfile::with_boundary(1, 2.0, 1.0, -0.8, 3.0, f64::INFINITY).unwrap();
        let zeros = zero_structure(&pr, 100.0).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].0 - 3.0).abs() < 1e-9);
        assert!((zeros[0].1 - 8.0).abs() < 1e-12); // kappa + 2a
    }

    #[test]
    fn interior_zero_is_rejected() {
        // generic shrinking profile: zeros at a = 1 and at a second point
        // beyond kappa/2; declaring b = infinity leaves the second zero in
        // the interior, which violates positivity
        let pr = SolitonProfile::with_boundary(1, 4.0, -1.0, 0.3, 1.0, f64::INFINITY).unwrap();
        assert!(completeness_report(&pr).is_err());
        // declaring the interval up to that zero makes the profile valid,
        // with a finite-distance simple zero on the right
        let z2 = zero_structure(&pr, 1.0e3).unwrap()[1].0;
        let pr = SolitonProfile::with_boundary(1, 4.0, -1.0, 0.3, 1.0, z2).unwrap();
        let (left, right) = completeness_report(&pr).unwrap();
        assert_eq!(left.kind, EndpointKind::FiniteDistanceSingular);
        assert_eq!(right.kind, EndpointKind::FiniteDistanceSingular);
    }

    #[test]
    fn slope_crosscheck_against_differences() {
        let pr = SolitonProfile::with_boundary(2, 5.0, -1.0, 0.9, 1.3, f64::INFINITY).unwrap();
        let zeros = zero_structure(&pr, 50.0).unwrap();
        for &(z, slope) in &zeros {
            let h = 1e-6;
            let fd = (pr.phi(z + h).unwrap() - pr.phi((z - h).max(1e-12)).unwrap()) / (2.0 * h);
            assert!(
                (fd - slope).abs() < 1e-6 * (1.0 + slope.abs()),
                "{fd} vs {slope}"
            );
        }
    }
}
