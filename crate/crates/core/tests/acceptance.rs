//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them).
//!
//! Randomized criteria draw from seeded generators so runs are
//! reproducible. Draws are kept inside the f64 conditioning envelope of the
//! closed forms (`evaluation_scale` at most ~1e3 times the residual scale):
//! outside it the double-precision representation of the cancelling terms,
//! not the mathematics, dominates any finite-difference residual.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use soliton_core::classify::{
    bundle_admissibility, completeness_report, extension_check, zero_structure, EndpointKind,
};
use soliton_core::flow::{cone_limit, glue_eternal, potential_gap, SelfSimilarFlow};
use soliton_core::fullmetric::{convergence_order, RadialMetricModel};
use soliton_core::mu_solver::{f_prime, solve_mu};
use soliton_core::ode::{integrate, Tolerances};
use soliton_core::profile::{nu_boundary, SolitonProfile};
use soliton_core::radial::{
    asymptotic_coefficient, integrate_sigma, oracle_integrate_linear, reconstruct_potential,
};
use soliton_core::sasaki::EtaEinsteinStructure;
use soliton_core::scalar::ScalarSolitonProfile;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn criterion(n: u32, what: &str, pass: bool, detail: &str) {
    println!(
        "[criterion {n}] {}: {what} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {what} ({detail})");
}

/// Random profile whose closed form is f64-evaluable: the exponential term
/// decays or is absent, and the term magnitudes stay within the
/// conditioning envelope on the test range.
fn draw_profile(rng: &mut ChaCha8Rng) -> SolitonProfile {
    loop {
        let m = rng.random_range(1..=5u32);
        let lambda = *[-1.0, 0.0, 1.0].choose(rng).unwrap();
        let kappa = rng.random_range(0.2..10.0) * if rng.random_bool(0.25) { -1.0 } else { 1.0 };
        let pr = match rng.random_range(0..3u8) {
            0 => SolitonProfile::cone(m, kappa, lambda, -rng.random_range(0.05..0.6)).unwrap(),
            1 => SolitonProfile::with_boundary(
                m,
                kappa,
                lambda,
                -rng.random_range(0.05..0.6),
                rng.random_range(0.1..5.0),
                f64::INFINITY,
            )
            .unwrap(),
            _ => SolitonProfile::new(
                m,
                kappa,
                lambda,
                rng.random_range(0.05..0.6) * if rng.random_bool(0.5) { -1.0 } else { 1.0 },
                0.0,
                rng.random_range(0.1..5.0),
                f64::INFINITY,
            )
            .unwrap(),
        };
        let mut ok = true;
        let mut sigma = pr.a().max(1e-3);
        while sigma <= 1.0e3 {
            let scale = 1.0 + pr.kappa().abs() + (pr.mu() * sigma).abs();
            match pr.evaluation_scale(sigma) {
                Ok(t) if t <= 1e3 * scale => {}
                _ => {
                    ok = false;
                    break;
                }
            }
            sigma *= 1.6;
        }
        if ok {
            return pr;
        }
    }
}

/// Scalar draw satisfying the completeness hypotheses, inside the
/// conditioning envelope.
fn draw_scalar(rng: &mut ChaCha8Rng) -> ScalarSolitonProfile {
    loop {
        let m = rng.random_range(1..=4u32);
        let c = -rng.random_range(0.2..6.0);
        let kappa = c / (f64::from(m) + 1.0) + rng.random_range(0.0..4.0);
        let mu = -rng.random_range(0.1..2.0);
        let pr = ScalarSolitonProfile::new(m, kappa, c, mu).unwrap();
        let ok = [1.01, 2.0, 4.0].iter().all(|&sigma| {
            matches!(pr.evaluation_scale(sigma),
                Ok(t) if t <= 5e2 * (1.0 + kappa.abs() + c.abs() * sigma))
        });
        if ok {
            return pr;
        }
    }
}

#[test]
fn criterion_1_closed_form_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let pr = draw_profile(&mut rng);
        let mut sigma = pr.a().max(1e-3);
        while sigma <= 1.0e3 {
            let r = pr.ode_residual(sigma).unwrap().abs();
            let scale = 1.0 + pr.kappa().abs() + (pr.mu() * sigma).abs();
            worst = worst.max(r / scale);
            sigma *= 1.45;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    criterion(
        1,
        "profile ODE residual over 1000 random draws",
        worst <= 1e-8 && elapsed < 10.0,
        &format!("max scaled residual = {worst:.3e}, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_2_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_profile: f64 = 0.0;
    for _ in 0..200 {
        let pr = draw_profile(&mut rng);
        let start = pr.a().max(0.3) + rng.random_range(0.1..1.0);
        let mut end = start * rng.random_range(2.0..8.0);
        if pr.mu() > 0.0 {
            // for mu > 0 the homogeneous mode e^{mu sigma} grows along the
            // integration; cap the range so the comparison itself stays
            // conditioned (amplification at most ~e^4)
            end = end.min(start + 4.0 / pr.mu());
        }
        let oracle = oracle_integrate_linear(
            pr.m(),
            pr.kappa(),
            pr.lambda(),
            pr.mu(),
            start,
            pr.phi(start).unwrap(),
            end,
        )
        .unwrap();
        let closed = pr.phi(end).unwrap();
        worst_profile = worst_profile.max((oracle - closed).abs() / (1.0 + closed.abs()));
    }

    let mut worst_scalar: f64 = 0.0;
    for _ in 0..200 {
        let pr = draw_scalar(&mut rng);
        let (m, kappa, c, mu, c1) = (pr.m(), pr.kappa(), pr.c(), pr.mu(), pr.c1());
        let mf = f64::from(m);
        let rhs = move |x: f64, y: &[f64; 1]| {
            [mu * y[0] + kappa * x.powi(m as i32) - c / (mf + 1.0) * x.powi(m as i32 + 1) + c1]
        };
        let tol = Tolerances {
            rtol: 1e-12,
            atol: 1e-14,
        };
        let end = rng.random_range(1.5..50.0);
        let y = integrate(&rhs, 1.0, [0.0], end, tol).unwrap()[0];
        let oracle_phi = y / end.powi(m as i32);
        let closed = pr.phi(end).unwrap();
        worst_scalar = worst_scalar.max((oracle_phi - closed).abs() / (1.0 + closed.abs()));
    }
    criterion(
        2,
        "closed forms vs direct ODE integration (200 + 200 cases)",
        worst_profile <= 1e-9 && worst_scalar <= 1e-9,
        &format!("profile gap = {worst_profile:.3e}, scalar gap = {worst_scalar:.3e}"),
    );
}

#[test]
fn criterion_3_mu_root_lemma() {
    let cert = solve_mu(1, 4.0, 1.0).unwrap();
    let unit_ok = (cert.root - SQRT2).abs() <= 1e-12
        && cert.sign_changes == 1
        && cert.root > cert.lower_bracket
        && cert.lower_bracket == 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut all_ok = true;
    let mut worst_phi: f64 = 0.0;
    let mut boundary_checks = 0u32;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=5u32);
        let kappa = rng.random_range(0.1..20.0);
        let a = rng.random_range(0.01..0.4999) * kappa;
        let cert = solve_mu(m, kappa, a).unwrap();
        all_ok &= cert.sign_changes == 1 && cert.root > cert.lower_bracket;
        let pr = SolitonProfile::new(m, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY).unwrap();
        // phi(a) = f(a, root) cannot be resolved below eps * root * |df/dmu|
        // (one ulp of the root itself); check the closure where that floor
        // sits safely under the 1e-10 target, i.e. away from the steep
        // near-bracket roots that small a with large m produces
        let steepness = f_prime(m, kappa, a, cert.root).unwrap().abs() * cert.root;
        if steepness * f64::EPSILON <= 1e-11 * (1.0 + kappa) {
            worst_phi = worst_phi.max(pr.phi(a).unwrap().abs() / (1.0 + kappa));
            boundary_checks += 1;
        }
    }
    criterion(
        3,
        "unique positive root with Descartes certificate (1e4 draws)",
        unit_ok && all_ok && worst_phi <= 1e-10 && boundary_checks > 8000,
        &format!(
            "unit root = {:.15}, max scaled |phi(a)| = {worst_phi:.3e} ({boundary_checks} boundary checks)",
            cert.root
        ),
    );
}

#[test]
fn criterion_4_zero_slope_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    let mut zeros_seen = 0u32;
    let mut check = |pr: &SolitonProfile, sigma_max: f64| {
        for (z, slope) in zero_structure(pr, sigma_max).unwrap() {
            // independent centered difference across the zero
            let h = 1e-6 * z.max(1.0);
            let fd = (pr.phi(z + h).unwrap() - pr.phi(z - h).unwrap()) / (2.0 * h);
            worst = worst.max((fd - slope).abs());
            zeros_seen += 1;
        }
    };
    // shrinking closures (zero at a), boundary profiles, and the double zero
    for _ in 0..30 {
        let kappa = rng.random_range(1.0..10.0);
        let a = rng.random_range(0.1..0.48) * kappa;
        let cert = solve_mu(1, kappa, a).unwrap();
        let pr = SolitonProfile::new(1, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY).unwrap();
        check(&pr, 50.0_f64.max(kappa));
    }
    for _ in 0..30 {
        let kappa = rng.random_range(0.5..8.0);
        let a = rng.random_range(0.2..3.0);
        let mu = -rng.random_range(0.2..1.0);
        let lambda = *[-1.0, 1.0].choose(&mut rng).unwrap();
        let pr = SolitonProfile::with_boundary(1, kappa, lambda, mu, a, f64::INFINITY).unwrap();
        check(&pr, 30.0_f64.max(2.0 * kappa));
    }
    let bridge = SolitonProfile::with_boundary(1, -2.0, 1.0, -1.0, 1.0, f64::INFINITY).unwrap();
    check(&bridge, 50.0);
    criterion(
        4,
        "slope at every located zero equals kappa + 2 lambda sigma0",
        worst <= 1e-6 && zeros_seen > 60,
        &format!("max slope defect = {worst:.3e} over {zeros_seen} zeros"),
    );
}

#[test]
fn criterion_5_zero_section_extension_instances() {
    // shrinking branch: (m, p, k) = (1, 2, 1)
    let cert = solve_mu(1, 4.0, 1.0).unwrap();
    let shrink = SolitonProfile::new(1, 4.0, -1.0, cert.root, 0.0, 1.0, f64::INFINITY).unwrap();
    let sv = extension_check(&shrink).unwrap();
    let shrink_ok = shrink.phi(1.0).unwrap().abs() <= 1e-10
        && (sv.slope - 2.0).abs() <= 1e-8
        && sv.kind == EndpointKind::SmoothZeroSection;

    // expanding branch: (m, p, k) = (1, 1, 2), a = 1/2
    let adm = bundle_admissibility(1, 2, 1.0).unwrap();
    let expand =
        SolitonProfile::with_boundary(1, 1.0, 1.0, -1.0, adm.a_required, f64::INFINITY).unwrap();
    let ev = extension_check(&expand).unwrap();
    let expand_ok = adm.a_required == 0.5
        && expand.phi(0.5).unwrap().abs() <= 1e-10
        && (ev.slope - 2.0).abs() <= 1e-8
        && ev.kind == EndpointKind::SmoothZeroSection;

    criterion(
        5,
        "zero-section extension for both soliton signs",
        shrink_ok && expand_ok,
        &format!("slopes = {:.12}, {:.12}", sv.slope, ev.slope),
    );
}

#[test]
fn criterion_6_expanding_cone_positivity_and_asymptotics() {
    let mut no_zeros = true;
    let mut worst_gap: f64 = 0.0;
    for kappa in [2.0, 4.0, 6.0] {
        for mu in [-0.5, -1.0, -2.0] {
            let pr = SolitonProfile::cone(1, kappa, 1.0, mu).unwrap();
            no_zeros &= zero_structure(&pr, 1.0e6).unwrap().is_empty();

            let span = 0.5 * mu.abs() * 1.0e-6f64.ln().abs() + 3.5;
            let n = ((span + 4.0 + mu.abs()) * 200.0) as usize | 1;
            let sol = reconstruct_potential(
                &integrate_sigma(&pr, 1.0, -(4.0 + mu.abs()), span, n).unwrap(),
            )
            .unwrap();
            // extraction fails unless its internal error estimate is <= 1e-6
            let e0 = asymptotic_coefficient(&sol, mu).unwrap();
            assert!(e0 > 0.0);
            let flow = SelfSimilarFlow::new(pr);
            let aperture = cone_limit(&flow, &sol).unwrap();
            worst_gap = worst_gap.max(potential_gap(&flow, &sol, &aperture, 1e-6, 41).unwrap());
        }
    }
    criterion(
        6,
        "no positive zeros, convergent E(0), t -> 0 aperture limit",
        no_zeros && worst_gap <= 1e-5,
        &format!("max potential gap at |t| = 1e-6: {worst_gap:.3e}"),
    );
}

#[test]
fn criterion_7_gluing() {
    let eternal = glue_eternal(1, 2, 1).unwrap();
    let q_ok = (eternal.aperture().exponent() - 1.0 / SQRT2).abs() <= 1e-12;
    let amp_ok = eternal.amplitude_mismatch() <= 1e-8;
    let cont = eternal.continuity_error(1e-6, 41).unwrap();
    criterion(
        7,
        "eternal flow: shared exponent, matched amplitudes, continuity",
        q_ok && amp_ok && cont <= 1e-5,
        &format!(
            "q = {:.15}, |E0-D0|/D0 = {:.3e}, two-sided gap = {cont:.3e}",
            eternal.aperture().exponent(),
            eternal.amplitude_mismatch()
        ),
    );
}

#[test]
fn criterion_8_scalar_soliton_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_boundary: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut positive = true;
    for _ in 0..200 {
        let pr = draw_scalar(&mut rng);
        worst_boundary = worst_boundary
            .max(pr.phi(1.0).unwrap().abs())
            .max(pr.phi_prime(1.0).unwrap().abs());
        let mut sigma = 1.01;
        while sigma <= 1.0e3 {
            worst_residual = worst_residual.max(pr.ode_residual(sigma).unwrap().abs());
            sigma *= 1.35;
        }
        positive &= pr.positivity_certificate(1.0e4).unwrap();
    }

    let mut worst_bridge: f64 = 0.0;
    for &(m, mu) in &[(1u32, -1.0), (2, -0.7), (3, -1.5), (4, -0.9)] {
        let c = -2.0 * (f64::from(m) + 1.0);
        let scalar = ScalarSolitonProfile::new(m, -2.0, c, mu).unwrap();
        let nu = nu_boundary(m, -2.0, 1.0, mu, 1.0).unwrap();
        let ricci = SolitonProfile::new(m, -2.0, 1.0, mu, nu, 1.0, f64::INFINITY).unwrap();
        // the double zero at a = 1 is Lemma-consistent: kappa + 2a = 0
        assert!(ricci.phi_prime(1.0).unwrap().abs() < 1e-10);
        let mut sigma = 1.01;
        while sigma <= 100.0 {
            let s = scalar.phi(sigma).unwrap();
            let r = ricci.phi(sigma).unwrap();
            worst_bridge = worst_bridge.max((s - r).abs() / (1.0 + r.abs()));
            sigma *= 1.3;
        }
    }
    criterion(
        8,
        "scalar solitons: boundary pair, residual, positivity, Ricci bridge",
        worst_boundary <= 1e-10
            && worst_residual <= 1e-8
            && positive
            && worst_bridge <= 1e-10,
        &format!(
            "boundary = {worst_boundary:.3e}, residual = {worst_residual:.3e}, bridge = {worst_bridge:.3e}"
        ),
    );
}

#[test]
fn criterion_9_full_metric_identity() {
    // exactly flat: the linear expanding profile
    let flat = SolitonProfile::cone(1, 4.0, 1.0, -1.0).unwrap();
    let flat_check = RadialMetricModel::build(&flat, 1.0, -3.0, 3.0, 6001)
        .unwrap()
        .identity_residual()
        .unwrap();

    // the (p, k) = (2, 1) shrinking profile with second-order convergence
    let cert = solve_mu(1, 4.0, 1.0).unwrap();
    let shrink = SolitonProfile::new(1, 4.0, -1.0, cert.root, 0.0, 1.0, f64::INFINITY).unwrap();
    let coarse = RadialMetricModel::build(&shrink, 2.0, -3.0, 3.0, 3001)
        .unwrap()
        .identity_residual()
        .unwrap();
    let fine = RadialMetricModel::build(&shrink, 2.0, -3.0, 3.0, 6001)
        .unwrap()
        .identity_residual()
        .unwrap();
    let order = convergence_order(coarse.max_residual, fine.max_residual);

    // wrong-mu control
    let wrong = RadialMetricModel::build_with_parameters(
        &shrink,
        2.0,
        -3.0,
        3.0,
        3001,
        -1.0,
        cert.root + 0.1,
    )
    .unwrap()
    .identity_residual()
    .unwrap();

    criterion(
        9,
        "soliton identity from the sampled potential alone",
        flat_check.max_residual <= 1e-9
            && fine.max_residual <= 1e-6
            && (1.6..=2.5).contains(&order)
            && wrong.max_residual > 1e-2,
        &format!(
            "flat = {:.3e}, shrinking = {:.3e} (order {order:.2}), wrong-mu = {:.3e}",
            flat_check.max_residual, fine.max_residual, wrong.max_residual
        ),
    );
}

#[test]
fn criterion_10_d_homothety_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut worst_group: f64 = 0.0;
    let mut worst_cov: f64 = 0.0;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=5u32);
        let alpha = rng.random_range(-10.0..10.0);
        let factor = rng.random_range(0.05..20.0);
        let e = EtaEinsteinStructure::new(m, alpha).unwrap();
        let back = e
            .d_homothety(factor)
            .unwrap()
            .d_homothety(1.0 / factor)
            .unwrap();
        worst_group = worst_group.max((back.alpha() - alpha).abs());
        let t = e.d_homothety(factor).unwrap();
        let expected = e.kappa() / factor;
        worst_cov = worst_cov.max((t.kappa() - expected).abs() / (1.0 + expected.abs()));
    }
    criterion(
        10,
        "group law and kappa covariance over 1e4 transformations",
        worst_group <= 1e-12 && worst_cov <= 1e-12,
        &format!("group defect = {worst_group:.3e}, covariance defect = {worst_cov:.3e}"),
    );
}

/// Cross-module consistency beyond the numbered criteria: the classifier,
/// integrator, and profile agree on the dichotomy between complete ends and
/// finite-distance boundaries.
#[test]
fn supporting_length_dichotomy() {
    use soliton_core::radial::geodesic_length;
    // double zero (order 2) => infinite length and a complete end
    let double = SolitonProfile::with_boundary(1, -2.0, 1.0, -1.0, 1.0, f64::INFINITY).unwrap();
    let len = geodesic_length(&double, 0.0, 2.0).unwrap();
    let (left, _) = completeness_report(&double).unwrap();
    assert!(len.is_infinite());
    assert_eq!(left.kind, EndpointKind::CompleteEnd);

    // simple zero (order 1) => finite length to the endpoint
    let simple = SolitonProfile::cone(1, 4.0, 1.0, -1.0).unwrap();
    let len = geodesic_length(&simple, 0.0, 1.0).unwrap();
    assert!(len.is_finite());
    let (left, right) = completeness_report(&simple).unwrap();
    assert_eq!(left.kind, EndpointKind::FiniteDistanceSingular);
    assert_eq!(right.kind, EndpointKind::UnboundedComplete);
    println!("[supporting] PASS: vanishing order matches the length dichotomy");
}
