//! Walk through of the shrinking-soliton pipeline on one bundle:
//! solve the closure root, build and classify the profile, reconstruct the
//! radial solution, and extract the cone-limit data.
//!
//! Run with `cargo run -p soliton-core --example shrinking_bundle`.

use soliton_core::classify::{bundle_admissibility, completeness_report};
use soliton_core::flow::{cone_limit, SelfSimilarFlow};
use soliton_core::mu_solver::solve_mu;
use soliton_core::profile::SolitonProfile;
use soliton_core::radial::{geodesic_length, integrate_sigma, reconstruct_potential};

fn main() -> soliton_core::Result<()> {
    let (m, p, k) = (1, 2, 1);
    let admissibility = bundle_admissibility(p, k, -1.0)?;
    let kappa = 2.0 * f64::from(p) / f64::from(k);
    let a = admissibility.a_required;
    println!("bundle (p, k) = ({p}, {k}): kappa = {kappa}, endpoint a = {a}");

    let cert = solve_mu(m, kappa, a)?;
    println!(
        "mu = {:.15} (bracket > {}, sign changes = {}, |f| = {:.2e})",
        cert.root, cert.lower_bracket, cert.sign_changes, cert.residual
    );

    let profile = SolitonProfile::new(m, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY)?;
    println!(
        "phi(a) = {:.3e}, phi'(a) = {:.12}",
        profile.phi(a)?,
        profile.phi_prime(a)?
    );

    let (left, right) = completeness_report(&profile)?;
    println!("left endpoint:  {:?}", left.kind);
    println!("right endpoint: {:?}", right.kind);
    println!(
        "distance from sigma0 to the zero section: {:.6}",
        geodesic_length(&profile, 0.0, 1.0)?
    );

    let solution = reconstruct_potential(&integrate_sigma(&profile, a + 1.0, -6.0, 12.0, 3001)?)?;
    let aperture = cone_limit(&SelfSimilarFlow::new(profile), &solution)?;
    println!(
        "t -> 0 cone limit: C = {:.10}, q = {:.10}",
        aperture.amplitude(),
        aperture.exponent()
    );
    Ok(())
}
