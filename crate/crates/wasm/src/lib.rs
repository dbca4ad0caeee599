//! Browser demo bindings: three interactive operations over the soliton
//! pipeline, each returning a JSON payload ready for plotting.
//!
//! The functions are plain computations (no DOM access), so they compile
//! and test on the host as well; the `www/` page loads the wasm build and
//! renders the curves on canvases.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use soliton_core::classify::{bundle_admissibility, completeness_report, zero_structure};
use soliton_core::error::Result as CoreResult;
use soliton_core::flow::glue_eternal;
use soliton_core::mu_solver::solve_mu;
use soliton_core::profile::SolitonProfile;
use soliton_core::scalar::ScalarSolitonProfile;

fn to_js<T: Serialize>(value: &T) -> Result<String, JsValue> {
    serde_json::to_string(value).map_err(|e| JsValue::from_str(&e.to_string()))
}

fn err_js(e: soliton_core::SolitonError) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[derive(Serialize)]
struct ProfileChart {
    kappa: f64,
    lambda: f64,
    mu: f64,
    nu: f64,
    a: f64,
    mu_solved: bool,
    sigma: Vec<f64>,
    phi: Vec<f64>,
    zeros: Vec<[f64; 2]>,
    left_kind: String,
    right_kind: String,
    slope_at_a: f64,
}

fn bundle_chart(m: u32, p: u32, k: u32, expanding: bool, mu_exp: f64) -> CoreResult<ProfileChart> {
    let lambda = if expanding { 1.0 } else { -1.0 };
    let adm = bundle_admissibility(p, k, lambda)?;
    if !adm.admissible {
        return Err(soliton_core::SolitonError::InvalidParameter(format!(
            "lambda = {lambda} needs {}; try swapping p and k",
            if expanding { "k > p" } else { "k < p" }
        )));
    }
    let kappa = 2.0 * f64::from(p) / f64::from(k);
    let a = adm.a_required;
    let (pr, solved) = if expanding {
        (
            SolitonProfile::with_boundary(m, kappa, lambda, mu_exp, a, f64::INFINITY)?,
            false,
        )
    } else {
        let cert = solve_mu(m, kappa, a)?;
        (
            SolitonProfile::new(m, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY)?,
            true,
        )
    };

    let (left, right) = completeness_report(&pr)?;
    let zeros = zero_structure(&pr, 8.0 * kappa.max(1.0))?
        .into_iter()
        .map(|(z, s)| [z, s])
        .collect();

    let n = 400;
    let hi = (3.0 * kappa).max(4.0 * a).max(6.0);
    let mut sigma = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for i in 0..n {
        let x = a + (hi - a) * (i as f64 + 0.5) / n as f64;
        sigma.push(x);
        phi.push(pr.phi(x)?);
    }
    Ok(ProfileChart {
        kappa,
        lambda,
        mu: pr.mu(),
        nu: pr.nu(),
        a,
        mu_solved: solved,
        sigma,
        phi,
        zeros,
        left_kind: format!("{:?}", left.kind),
        right_kind: format!("{:?}", right.kind),
        slope_at_a: pr.phi_prime(a)?,
    })
}

/// Profile of the shrinking (`expanding = false`, `k < p`, `mu` solved) or
/// expanding (`expanding = true`, `k > p`, `mu < 0` given) bundle soliton.
#[wasm_bindgen]
pub fn bundle_profile(m: u32, p: u32, k: u32, expanding: bool, mu: f64) -> Result<String, JsValue> {
    to_js(&bundle_chart(m, p, k, expanding, mu).map_err(err_js)?)
}

#[derive(Serialize)]
struct FlowCurve {
    t: f64,
    r: Vec<f64>,
    potential: Vec<f64>,
}

#[derive(Serialize)]
struct EternalChart {
    q: f64,
    amplitude: f64,
    mu_shrink: f64,
    translation: f64,
    continuity_error: f64,
    aperture: FlowCurve,
    curves: Vec<FlowCurve>,
}

fn eternal_chart(m: u32, p: u32, k: u32) -> CoreResult<EternalChart> {
    let eternal = glue_eternal(m, p, k)?;
    let continuity = eternal.continuity_error(1e-6, 41)?;

    let n = 121;
    let radii: Vec<f64> = (0..n)
        .map(|i| (-2.0 + 4.0 * i as f64 / (n as f64 - 1.0)).exp())
        .collect();
    let mut curves = Vec::new();
    for &t in &[-1.0, -0.1, -1e-3, 1e-3, 0.1, 1.0] {
        let (flow, sol) = if t < 0.0 {
            (eternal.shrinking(), eternal.shrink_solution())
        } else {
            (eternal.expanding(), eternal.expand_solution())
        };
        let mut potential = Vec::with_capacity(n);
        for &r in &radii {
            potential.push(flow.potential(sol, t, r)?);
        }
        curves.push(FlowCurve {
            t,
            r: radii.clone(),
            potential,
        });
    }
    let mut cone = Vec::with_capacity(n);
    for &r in &radii {
        cone.push(eternal.aperture().potential(r)?);
    }
    Ok(EternalChart {
        q: eternal.aperture().exponent(),
        amplitude: eternal.aperture().amplitude(),
        mu_shrink: eternal.shrinking().profile().mu(),
        translation: eternal.translation(),
        continuity_error: continuity,
        aperture: FlowCurve {
            t: 0.0,
            r: radii,
            potential: cone,
        },
        curves,
    })
}

/// Eternal flow for `0 < k < p`: shrinking and expanding potential slices
/// around the shared `t -> 0` aperture cone.
#[wasm_bindgen]
pub fn eternal_flow(m: u32, p: u32, k: u32) -> Result<String, JsValue> {
    to_js(&eternal_chart(m, p, k).map_err(err_js)?)
}

#[derive(Serialize)]
struct ScalarChart {
    c1: f64,
    c2: f64,
    positive: bool,
    max_residual: f64,
    ricci_soliton: bool,
    sigma: Vec<f64>,
    phi: Vec<f64>,
}

fn scalar_chart(m: u32, kappa: f64, c: f64, mu: f64, sigma_max: f64) -> CoreResult<ScalarChart> {
    let pr = ScalarSolitonProfile::new(m, kappa, c, mu)?;
    let positive = pr
        .positivity_certificate(sigma_max.min(1.0e4))
        .unwrap_or(false);
    let mut max_residual = 0.0f64;
    let mut s = 1.01;
    while s <= 100.0 {
        max_residual = max_residual.max(pr.ode_residual(s)?.abs());
        s *= 1.5;
    }
    let ricci = soliton_core::scalar::ricci_specialize(m, kappa)
        .map(|r| (r.c - c).abs() <= 1e-12 * (1.0 + c.abs()))
        .unwrap_or(false);

    let n = 400;
    let hi = sigma_max.clamp(2.0, 50.0);
    let mut sigma = Vec::with_capacity(n + 1);
    let mut phi = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = 1.0 + (hi - 1.0) * i as f64 / n as f64;
        sigma.push(x);
        phi.push(pr.phi(x)?);
    }
    Ok(ScalarChart {
        c1: pr.c1(),
        c2: pr.c2(),
        positive,
        max_residual,
        ricci_soliton: ricci,
        sigma,
        phi,
    })
}

/// Gradient scalar soliton profile on `(1, oo)` with its positivity verdict
/// and equation residual.
#[wasm_bindgen]
pub fn scalar_profile(
    m: u32,
    kappa: f64,
    c: f64,
    mu: f64,
    sigma_max: f64,
) -> Result<String, JsValue> {
    to_js(&scalar_chart(m, kappa, c, mu, sigma_max).map_err(err_js)?)
}
