//! Radial sampling of the scalar-soliton profile in the same CSV schema as
//! the Ricci-soliton profiles.

use soliton_core::error::Result;
use soliton_core::ode::{integrate_path, Tolerances};
use soliton_core::scalar::ScalarSolitonProfile;

/// Integrate `d sigma/ds = phi(sigma)` with `sigma(0) = 2` together with the
/// potential and arclength columns, and render the rows as CSV.
pub fn scalar_profile_csv(pr: &ScalarSolitonProfile, samples: usize) -> Result<String> {
    use std::fmt::Write as _;
    let n = samples.max(2);
    let (s_min, s_max) = (-6.0, 6.0);
    let step = (s_max - s_min) / (n as f64 - 1.0);
    let prof = *pr;
    let rhs = move |_s: f64, y: &[f64; 3]| {
        let phi = prof.phi(y[0]).unwrap_or(f64::NAN);
        [phi, y[0] - 1.0, phi.max(0.0).sqrt()]
    };
    let tol = Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
    };

    let mut text = String::from("s,sigma,phi,F,potential,length,residual\n");
    let mut rows: Vec<(f64, [f64; 3])> = Vec::with_capacity(n);
    // forward and backward passes from s = 0, clipped where sigma -> 1
    for forward in [true, false] {
        let targets: Vec<f64> = (0..n)
            .map(|i| s_min + step * i as f64)
            .filter(|&s| if forward { s >= 0.0 } else { s < 0.0 })
            .collect();
        let targets: Vec<f64> = if forward {
            targets
        } else {
            targets.into_iter().rev().collect()
        };
        if targets.is_empty() {
            continue;
        }
        let mut path = vec![0.0];
        path.extend(&targets);
        match integrate_path(&rhs, &path, [2.0, 0.0, 0.0], tol) {
            Ok(states) => {
                for (s, y) in targets.iter().zip(states.into_iter().skip(1)) {
                    if y[0].is_finite() && y[0] > 1.0 {
                        rows.push((*s, y));
                    }
                }
            }
            Err(_) => continue, // clipped end
        }
    }
    rows.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    for (s, y) in rows {
        let sigma = y[0];
        let phi = pr.phi(sigma)?;
        let residual = if sigma > 1.0 {
            pr.ode_residual(sigma).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        writeln!(
            text,
            "{s:.16e},{sigma:.16e},{phi:.16e},{:.16e},{:.16e},{:.16e},{residual:.16e}",
            y[1],
            s + y[1],
            y[2]
        )
        .expect("string write");
    }
    Ok(text)
}
