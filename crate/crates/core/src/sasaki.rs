//! Parameter algebra of eta-Einstein Sasaki structures.
//!
//! A (2m+1)-dimensional Sasaki manifold is eta-Einstein when
//! `Ric = alpha g + beta eta (x) eta`; tracing against the Reeb direction
//! forces `alpha + beta = 2m`, and the transverse Kähler metric is Einstein
//! with constant `kappa = alpha + 2`. Everything downstream consumes only
//! the scalars (m, alpha, beta, kappa), so that is all we store.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolitonError};

/// Absolute tolerance on `alpha` used for structure equality.
pub const ALPHA_EQ_TOL: f64 = 1e-12;

/// Scalar data of an eta-Einstein Sasaki structure.
///
/// `beta` and `kappa` are derived from `(m, alpha)` on demand so repeated
/// D-homotheties do not accumulate drift between the three constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEinsteinStructure {
    m: u32,
    alpha: f64,
}

impl EtaEinsteinStructure {
    /// Build the structure from the transverse complex dimension `m >= 1`
    /// and the Einstein constant `alpha`.
    pub fn new(m: u32, alpha: f64) -> Result<Self> {
        if m < 1 {
            return Err(SolitonError::InvalidParameter(
                "transverse dimension m must be >= 1".into(),
            ));
        }
        if !alpha.is_finite() {
            return Err(SolitonError::InvalidParameter(
                "alpha must be finite".into(),
            ));
        }
        Ok(Self { m, alpha })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `beta = 2m - alpha`.
    pub fn beta(&self) -> f64 {
        2.0 * f64::from(self.m) - self.alpha
    }

    /// Transverse Einstein constant `kappa = alpha + 2`.
    pub fn kappa(&self) -> f64 {
        self.alpha + 2.0
    }

    /// Sasaki-Einstein means `beta = 0`, equivalently `kappa = 2m + 2`.
    pub fn is_sasaki_einstein(&self) -> bool {
        self.beta().abs() <= ALPHA_EQ_TOL
    }

    /// D-homothetic transformation `r -> r^a` with `a = factor > 0`:
    /// `alpha' = (alpha + 2 - 2 factor) / factor`, hence `kappa' = kappa / factor`.
    pub fn d_homothety(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(SolitonError::InvalidParameter(format!(
                "D-homothety factor must be positive and finite, got {factor}"
            )));
        }
        Ok(Self {
            m: self.m,
            alpha: (self.alpha + 2.0 - 2.0 * factor) / factor,
        })
    }

    /// Find the D-homothety factor mapping this structure onto one with the
    /// requested Einstein constant. Only same-sign (or both-zero) targets are
    /// reachable; the returned structure has `kappa = target_kappa` exactly.
    pub fn normalize_to_kappa(&self, target_kappa: f64) -> Result<(f64, Self)> {
        let kappa = self.kappa();
        if kappa == 0.0 && target_kappa == 0.0 {
            return Ok((1.0, *self));
        }
        if kappa.signum() != target_kappa.signum() || kappa == 0.0 || target_kappa == 0.0 {
            return Err(SolitonError::SignMismatch(format!(
                "cannot transform kappa = {kappa} to kappa' = {target_kappa}: \
                 D-homotheties preserve the sign of the Einstein constant"
            )));
        }
        let factor = kappa / target_kappa;
        let transformed = Self {
            m: self.m,
            alpha: target_kappa - 2.0,
        };
        Ok((factor, transformed))
    }

    /// Equality up to `ALPHA_EQ_TOL` on `alpha` (same `m` required).
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.m == other.m && (self.alpha - other.alpha).abs() <= ALPHA_EQ_TOL
    }
}

/// A positive line bundle datum: `K_M = L^{-p}` and the bundle power `k`
/// of `L^{-k}` whose unit-circle bundle carries the Sasaki structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBundleData {
    p: u32,
    k: u32,
}

impl LineBundleData {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if p < 1 || k < 1 {
            return Err(SolitonError::InvalidParameter(
                "line bundle data requires p >= 1 and k >= 1".into(),
            ));
        }
        Ok(Self { p, k })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Normalized transverse Einstein constant `kappa = 2p / k`.
    pub fn kappa(&self) -> f64 {
        2.0 * f64::from(self.p) / f64::from(self.k)
    }
}

/// Aperture data of a Ricci-flat Kähler cone limit: Kähler potential
/// `amplitude * r^(2q) / (2q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeAperture {
    amplitude: f64,
    exponent: f64,
}

impl ConeAperture {
    pub fn new(amplitude: f64, exponent: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(SolitonError::InvalidParameter(format!(
                "aperture amplitude must be positive, got {amplitude}"
            )));
        }
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(SolitonError::InvalidParameter(format!(
                "aperture exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self {
            amplitude,
            exponent,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Radial Kähler potential `C r^(2q) / (2q)` of the aperture cone.
    pub fn potential(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(SolitonError::OutOfDomain(format!(
                "aperture potential requires r > 0, got {r}"
            )));
        }
        let two_q = 2.0 * self.exponent;
        Ok(self.amplitude * r.powf(two_q) / two_q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sasaki_einstein_sphere() {
        // round S^3: m = 1, alpha = 2 gives beta = 0, kappa = 2m + 2 = 4
        let e = EtaEinsteinStructure::new(1, 2.0).unwrap();
        assert_eq!(e.beta(), 0.0);
        assert_eq!(e.kappa(), 4.0);
        assert!(e.is_sasaki_einstein());

        let e = EtaEinsteinStructure::new(2, 4.0).unwrap();
        assert_eq!(e.beta(), 0.0);
        assert_eq!(e.kappa(), 6.0);
        assert!(e.is_sasaki_einstein());
    }

    #[test]
    fn negative_alpha_arithmetic() {
        let e = EtaEinsteinStructure::new(1, -4.0).unwrap();
        assert_eq!(e.beta(), 6.0);
        assert_eq!(e.kappa(), -2.0);
        assert!(!e.is_sasaki_einstein());
    }

    #[test]
    fn d_homothety_identity_and_ratio() {
        let e = EtaEinsteinStructure::new(1, 2.0).unwrap();
        assert_eq!(e.d_homothety(1.0).unwrap().alpha(), 2.0);
        // kappa = 4, factor 2 -> kappa' = 2
        let half = e.d_homothety(2.0).unwrap();
        assert!((half.kappa() - 2.0).abs() < 1e-15);
        // rejects non-positive factors
        assert!(e.d_homothety(0.0).is_err());
        assert!(e.d_homothety(-1.0).is_err());
    }

    #[test]
    fn normalize_kappa_ratio_and_sign() {
        let e = EtaEinsteinStructure::new(1, 2.0).unwrap();
        let (factor, out) = e.normalize_to_kappa(2.0).unwrap();
        assert_eq!(factor, 2.0);
        assert_eq!(out.kappa(), 2.0);

        // kappa = 2m + 2 = 4 onto 2p/k with p = 2, k = 1: factor 1
        let target = LineBundleData::new(2, 1).unwrap().kappa();
        let (factor, out) = e.normalize_to_kappa(target).unwrap();
        assert_eq!(factor, 1.0);
        assert!(out.approx_eq(&e));

        // opposite sign is unreachable
        assert!(e.normalize_to_kappa(-2.0).is_err());
    }

    #[test]
    fn bundle_kappa_values() {
        assert_eq!(LineBundleData::new(2, 1).unwrap().kappa(), 4.0);
        assert_eq!(LineBundleData::new(3, 2).unwrap().kappa(), 3.0);
        assert_eq!(LineBundleData::new(1, 2).unwrap().kappa(), 1.0);
        assert!(LineBundleData::new(0, 1).is_err());
    }

    #[test]
    fn bundle_kappa_two_split() {
        // kappa > 2 iff k < p, = 2 iff k = p, < 2 iff k > p
        for p in 1..=6u32 {
            for k in 1..=6u32 {
                let kappa = LineBundleData::new(p, k).unwrap().kappa();
                match k.cmp(&p) {
                    std::cmp::Ordering::Less => assert!(kappa > 2.0),
                    std::cmp::Ordering::Equal => assert_eq!(kappa, 2.0),
                    std::cmp::Ordering::Greater => assert!(kappa < 2.0),
                }
            }
        }
    }

    #[test]
    fn aperture_potential_values() {
        let c = ConeAperture::new(1.0, 1.0).unwrap();
        assert_eq!(c.potential(1.0).unwrap(), 0.5);
        let c = ConeAperture::new(2.0, 1.0).unwrap();
        assert_eq!(c.potential(2.0).unwrap(), 4.0);
        let c = ConeAperture::new(1.0, 0.5).unwrap();
        let e = std::f64::consts::E;
        assert!((c.potential(e).unwrap() - e).abs() < 1e-15);
        assert!(c.potential(0.0).is_err());
        assert!(ConeAperture::new(-1.0, 1.0).is_err());
        assert!(ConeAperture::new(1.0, 0.0).is_err());
    }

    proptest! {
        // group law: transforming by a then 1/a returns the original alpha
        #[test]
        fn d_homothety_group_law(alpha in -10.0..10.0f64, a in 0.05..20.0f64) {
            let e = EtaEinsteinStructure::new(1, alpha).unwrap();
            let back = e.d_homothety(a).unwrap().d_homothety(1.0 / a).unwrap();
            prop_assert!((back.alpha() - alpha).abs() <= 1e-12);
        }

        // kappa covariance: kappa' = kappa / a
        #[test]
        fn d_homothety_kappa_covariance(alpha in -10.0..10.0f64, a in 0.05..20.0f64) {
            let e = EtaEinsteinStructure::new(2, alpha).unwrap();
            let t = e.d_homothety(a).unwrap();
            let expected = e.kappa() / a;
            prop_assert!((t.kappa() - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }

        // beta = 0 iff kappa = 2m + 2
        #[test]
        fn sasaki_einstein_characterization(m in 1u32..6, alpha in -10.0..10.0f64) {
            let e = EtaEinsteinStructure::new(m, alpha).unwrap();
            let beta_zero = e.beta().abs() <= ALPHA_EQ_TOL;
            let kappa_full = (e.kappa() - (2.0 * f64::from(m) + 2.0)).abs() <= ALPHA_EQ_TOL;
            prop_assert_eq!(beta_zero, kappa_full);
        }
    }
}
