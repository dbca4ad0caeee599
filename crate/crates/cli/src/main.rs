//! Command-line front end: constructs soliton cases, runs verification
//! suites, and emits CSV profiles plus a JSON report per run.
//!
//! Exit codes: 0 success, 1 invalid parameters, 2 solver non-convergence,
//! 3 verification failure.

// `!(x > 0.0)` rejects NaN as well, unlike `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod sample;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use soliton_core::classify::{bundle_admissibility, completeness_report, zero_structure};
use soliton_core::error::{Result, SolitonError};
use soliton_core::flow::{cone_limit, glue_eternal, SelfSimilarFlow};
use soliton_core::fullmetric::{convergence_order, RadialMetricModel};
use soliton_core::mu_solver::solve_mu;
use soliton_core::profile::SolitonProfile;
use soliton_core::radial::{integrate_sigma, reconstruct_potential};
use soliton_core::report::{
    write_profile_csv, ApertureBlock, ClassificationBlock, FullMetricBlock, Report, ScalarBlock,
    StructureBlock,
};
use soliton_core::sasaki::{EtaEinsteinStructure, LineBundleData};
use soliton_core::scalar::ScalarSolitonProfile;

#[derive(Parser)]
#[command(
    name = "soliton",
    version,
    about = "Gradient Kähler-Ricci and scalar solitons on Sasaki cones: construction, classification, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Normalization sigma(0); defaults to a + 1 (or 1 when a = 0)
    #[arg(long)]
    sigma0: Option<f64>,
    /// Left end of the sampled log-radius window
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    s_min: f64,
    /// Right end of the sampled log-radius window
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    s_max: f64,
    /// Number of samples
    #[arg(long, default_value_t = 2001)]
    samples: usize,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output directory for profile.csv and report.json (stdout JSON if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Expanding soliton on the cone itself (left endpoint at the apex)
    ExpandCone {
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Transverse Einstein constant (> 0)
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        /// Soliton coefficient (< 0); exclusive with --q
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// Aperture exponent q > 0 (sets mu = -1/q)
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Expanding soliton on a line bundle (k > p)
    ExpandBundle {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        /// Soliton coefficient (< 0)
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        mu: f64,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Shrinking soliton on a line bundle (0 < k < p); mu is solved for
    ShrinkBundle {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Glue the shrinking and expanding solitons into an eternal flow
    Glue {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gradient scalar soliton on (1, oo)
    Scalar {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        /// Target scalar-curvature constant
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        /// Positivity-scan upper bound
        #[arg(long, default_value_t = 1.0e4)]
        sigma_max: f64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run verification suites (exit 3 on any failure)
    Verify {
        /// Suite: algebra, closed-form, mu, extension, cone, glue, scalar,
        /// fullmetric, or all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Residual threshold for residual-type checks
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Re-verify the verdicts stored in an existing report.json
        #[arg(long)]
        from_report: Option<PathBuf>,
    },
    /// Sweep the shrinking-soliton root mu over a range of endpoints a
    Sweep {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        a_min: f64,
        #[arg(long)]
        a_max: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn main() -> ExitCode {
    // usage problems are "invalid parameters" (exit 1); --help/--version exit 0
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::ExpandCone {
            m,
            kappa,
            mu,
            q,
            window,
            out,
        } => expand_cone(m, kappa, mu, q, window, out),
        Command::ExpandBundle {
            m,
            p,
            k,
            mu,
            window,
            out,
        } => expand_bundle(m, p, k, mu, window, out),
        Command::ShrinkBundle {
            m,
            p,
            k,
            window,
            out,
        } => shrink_bundle(m, p, k, window, out),
        Command::Glue { m, p, k, out } => glue(m, p, k, out),
        Command::Scalar {
            m,
            kappa,
            c,
            mu,
            sigma_max,
            samples,
            out,
        } => scalar(m, kappa, c, mu, sigma_max, samples, out),
        Command::Verify {
            suite,
            tol,
            from_report,
        } => match from_report {
            Some(path) => verify::from_report(&path, tol),
            None => verify::run_suite(&suite, tol),
        },
        Command::Sweep {
            m,
            kappa,
            a_min,
            a_max,
            samples,
            out,
        } => sweep(m, kappa, a_min, a_max, samples, out),
    }
}

fn params(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn emit(
    report: &Report,
    sol: Option<&soliton_core::radial::RadialSolution>,
    out: &OutArgs,
) -> Result<()> {
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.json"), report.to_json()?)?;
            if let Some(sol) = sol {
                let mut buf = Vec::new();
                write_profile_csv(&mut buf, sol)?;
                fs::write(dir.join("profile.csv"), buf)?;
            }
            Ok(())
        }
        None => {
            print!("{}", report.to_json()?);
            Ok(())
        }
    }
}

fn default_sigma0(pr: &SolitonProfile, requested: Option<f64>) -> f64 {
    requested.unwrap_or(if pr.a() == 0.0 { 1.0 } else { pr.a() + 1.0 })
}

fn expand_cone(
    m: u32,
    kappa: f64,
    mu: Option<f64>,
    q: Option<f64>,
    window: WindowArgs,
    out: OutArgs,
) -> Result<()> {
    let mu = match (mu, q) {
        (Some(mu), None) => mu,
        (None, Some(q)) if q > 0.0 => -1.0 / q,
        (None, None) => -1.0,
        _ => {
            return Err(SolitonError::InvalidParameter(
                "pass exactly one of --mu (< 0) or --q (> 0)".into(),
            ))
        }
    };
    if !(mu < 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "an expanding cone soliton needs mu < 0, got {mu}"
        )));
    }
    if !(kappa > 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "the cone construction needs kappa > 0, got {kappa}"
        )));
    }
    let structure = EtaEinsteinStructure::new(m, kappa - 2.0)?;
    let pr = SolitonProfile::cone(m, kappa, 1.0, mu)?;

    // no positive zero may appear (the profile must stay a metric)
    let zeros = zero_structure(&pr, 1.0e6)?;
    if !zeros.is_empty() {
        return Err(SolitonError::VerificationFailure(format!(
            "expanding cone profile has positive zeros: {zeros:?}"
        )));
    }

    let sigma0 = default_sigma0(&pr, window.sigma0);
    let sol = reconstruct_potential(&integrate_sigma(
        &pr,
        sigma0,
        window.s_min,
        window.s_max,
        window.samples,
    )?)?;
    let flow = SelfSimilarFlow::new(pr);
    let aperture = cone_limit(&flow, &sol)?;
    let (left, right) = completeness_report(&pr)?;

    let mut report = Report::new(
        "expand-cone",
        params(&[
            ("m", m.to_string()),
            ("kappa", kappa.to_string()),
            ("mu", mu.to_string()),
            ("sigma0", sigma0.to_string()),
            ("s_min", window.s_min.to_string()),
            ("s_max", window.s_max.to_string()),
            ("samples", window.samples.to_string()),
        ]),
    );
    report.structure = Some(StructureBlock::new(&structure, None));
    report.aperture = Some((&aperture).into());
    report.profile = Some((&pr).into());
    report.classification = Some(ClassificationBlock {
        left,
        right,
        bundle: None,
    });
    emit(&report, Some(&sol), &out)
}

fn expand_bundle(m: u32, p: u32, k: u32, mu: f64, window: WindowArgs, out: OutArgs) -> Result<()> {
    let bundle = LineBundleData::new(p, k)?;
    let admissibility = bundle_admissibility(p, k, 1.0)?;
    if !admissibility.admissible {
        return Err(SolitonError::InvalidParameter(format!(
            "an expanding bundle soliton requires k > p, got p = {p}, k = {k}"
        )));
    }
    if !(mu < 0.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "an expanding bundle soliton needs mu < 0, got {mu}"
        )));
    }
    let kappa = bundle.kappa();
    let a = admissibility.a_required;
    let structure = EtaEinsteinStructure::new(m, kappa - 2.0)?;
    let pr = SolitonProfile::with_boundary(m, kappa, 1.0, mu, a, f64::INFINITY)?;

    let sigma0 = default_sigma0(&pr, window.sigma0);
    let sol = reconstruct_potential(&integrate_sigma(
        &pr,
        sigma0,
        window.s_min,
        window.s_max,
        window.samples,
    )?)?;
    let flow = SelfSimilarFlow::new(pr);
    let aperture = cone_limit(&flow, &sol)?;
    let (left, right) = completeness_report(&pr)?;

    let mut report = Report::new(
        "expand-bundle",
        params(&[
            ("m", m.to_string()),
            ("p", p.to_string()),
            ("k", k.to_string()),
            ("mu", mu.to_string()),
            ("sigma0", sigma0.to_string()),
            ("s_min", window.s_min.to_string()),
            ("s_max", window.s_max.to_string()),
            ("samples", window.samples.to_string()),
        ]),
    );
    report.structure = Some(StructureBlock::new(&structure, Some(&bundle)));
    report.aperture = Some((&aperture).into());
    report.profile = Some((&pr).into());
    report.classification = Some(ClassificationBlock {
        left,
        right,
        bundle: Some(admissibility),
    });
    emit(&report, Some(&sol), &out)
}

fn shrink_bundle(m: u32, p: u32, k: u32, window: WindowArgs, out: OutArgs) -> Result<()> {
    let bundle = LineBundleData::new(p, k)?;
    let admissibility = bundle_admissibility(p, k, -1.0)?;
    if !admissibility.admissible {
        return Err(SolitonError::InvalidParameter(format!(
            "a shrinking bundle soliton requires 0 < k < p, got p = {p}, k = {k}"
        )));
    }
    let kappa = bundle.kappa();
    let a = admissibility.a_required;
    let structure = EtaEinsteinStructure::new(m, kappa - 2.0)?;
    let cert = solve_mu(m, kappa, a)?;
    let pr = SolitonProfile::new(m, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY)?;

    let sigma0 = default_sigma0(&pr, window.sigma0);
    let sol = reconstruct_potential(&integrate_sigma(
        &pr,
        sigma0,
        window.s_min,
        window.s_max,
        window.samples,
    )?)?;
    let flow = SelfSimilarFlow::new(pr);
    let aperture = cone_limit(&flow, &sol)?;
    let (left, right) = completeness_report(&pr)?;

    let mut report = Report::new(
        "shrink-bundle",
        params(&[
            ("m", m.to_string()),
            ("p", p.to_string()),
            ("k", k.to_string()),
            ("sigma0", sigma0.to_string()),
            ("s_min", window.s_min.to_string()),
            ("s_max", window.s_max.to_string()),
            ("samples", window.samples.to_string()),
        ]),
    );
    report.structure = Some(StructureBlock::new(&structure, Some(&bundle)));
    report.aperture = Some((&aperture).into());
    report.profile = Some((&pr).into());
    report.mu_certificate = Some(cert);
    report.classification = Some(ClassificationBlock {
        left,
        right,
        bundle: Some(admissibility),
    });
    if m == 1 && (kappa - 4.0).abs() < 1e-9 {
        report.fullmetric = Some(fullmetric_block(&pr, sigma0)?);
    }
    emit(&report, Some(&sol), &out)
}

fn fullmetric_block(pr: &SolitonProfile, sigma0: f64) -> Result<FullMetricBlock> {
    let coarse = RadialMetricModel::build(pr, sigma0, -3.0, 3.0, 3001)?;
    let fine = RadialMetricModel::build(pr, sigma0, -3.0, 3.0, 6001)?;
    let rc = coarse.identity_residual()?;
    let rf = fine.identity_residual()?;
    Ok(FullMetricBlock::new(
        fine.grid(),
        &rf,
        Some(convergence_order(rc.max_residual, rf.max_residual)),
    ))
}

fn glue(m: u32, p: u32, k: u32, out: OutArgs) -> Result<()> {
    let bundle = LineBundleData::new(p, k)?;
    let eternal = glue_eternal(m, p, k)?;
    let continuity = eternal.continuity_error(1e-6, 41)?;
    if continuity > 1e-5 {
        return Err(SolitonError::VerificationFailure(format!(
            "t -> 0 potential continuity defect {continuity:.3e} exceeds 1e-5"
        )));
    }
    let structure = EtaEinsteinStructure::new(m, bundle.kappa() - 2.0)?;
    let shrink_pr = *eternal.shrinking().profile();
    let (left, right) = completeness_report(&shrink_pr)?;

    let mut report = Report::new(
        "glue",
        params(&[
            ("m", m.to_string()),
            ("p", p.to_string()),
            ("k", k.to_string()),
        ]),
    );
    report.structure = Some(StructureBlock::new(&structure, Some(&bundle)));
    report.aperture = Some(ApertureBlock::from(eternal.aperture()));
    report.profile = Some((&shrink_pr).into());
    report.mu_certificate = Some(*eternal.mu_certificate());
    report.classification = Some(ClassificationBlock {
        left,
        right,
        bundle: Some(bundle_admissibility(p, k, -1.0)?),
    });
    report.eternal = Some(eternal.summary(continuity));

    if let Some(dir) = &out.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), report.to_json()?)?;
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, eternal.shrink_solution())?;
        fs::write(dir.join("profile.csv"), buf)?;
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, eternal.expand_solution())?;
        fs::write(dir.join("expand_profile.csv"), buf)?;
        fs::write(dir.join("flow_slices.csv"), flow_slices(&eternal)?)?;
        Ok(())
    } else {
        print!("{}", report.to_json()?);
        Ok(())
    }
}

fn flow_slices(eternal: &soliton_core::flow::EternalSolution) -> Result<String> {
    use std::fmt::Write as _;
    let mut text = String::from("t,r,potential\n");
    let times = [-1.0, -1e-3, -1e-6, 1e-6, 1e-3, 1.0];
    for &t in &times {
        for i in 0..41u32 {
            let s = -2.0 + 4.0 * f64::from(i) / 40.0;
            let r = s.exp();
            let (flow, sol) = if t < 0.0 {
                (eternal.shrinking(), eternal.shrink_solution())
            } else {
                (eternal.expanding(), eternal.expand_solution())
            };
            let v = flow.potential(sol, t, r)?;
            writeln!(text, "{t:.16e},{r:.16e},{v:.16e}").expect("string write");
        }
    }
    Ok(text)
}

fn scalar(
    m: u32,
    kappa: f64,
    c: f64,
    mu: f64,
    sigma_max: f64,
    samples: usize,
    out: OutArgs,
) -> Result<()> {
    let pr = ScalarSolitonProfile::new(m, kappa, c, mu)?;
    let positivity_up_to = match pr.positivity_certificate(sigma_max) {
        Ok(true) => sigma_max,
        Ok(false) => {
            return Err(SolitonError::VerificationFailure(
                "scalar profile loses positivity inside the scan range".into(),
            ))
        }
        Err(_) => f64::NAN, // hypotheses not met: scan skipped
    };
    let mut max_residual = 0.0f64;
    let mut sigma = 1.01;
    while sigma <= 1.0e3 {
        max_residual = max_residual.max(pr.ode_residual(sigma)?.abs());
        sigma *= 1.2;
    }
    let ricci = soliton_core::scalar::ricci_specialize(m, kappa)
        .map(|r| (r.c - c).abs() <= 1e-12 * (1.0 + c.abs()))
        .unwrap_or(false);

    let mut report = Report::new(
        "scalar",
        params(&[
            ("m", m.to_string()),
            ("kappa", kappa.to_string()),
            ("c", c.to_string()),
            ("mu", mu.to_string()),
            ("sigma_max", sigma_max.to_string()),
            ("samples", samples.to_string()),
        ]),
    );
    report.structure = Some(StructureBlock::new(
        &EtaEinsteinStructure::new(m, kappa - 2.0)?,
        None,
    ));
    report.scalar = Some(ScalarBlock {
        m,
        kappa,
        c,
        mu,
        c1: pr.c1(),
        c2: pr.c2(),
        positivity_up_to,
        max_residual,
        ricci_specialization: ricci,
    });

    if let Some(dir) = &out.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), report.to_json()?)?;
        fs::write(
            dir.join("profile.csv"),
            sample::scalar_profile_csv(&pr, samples)?,
        )?;
        Ok(())
    } else {
        print!("{}", report.to_json()?);
        Ok(())
    }
}

fn sweep(m: u32, kappa: f64, a_min: f64, a_max: f64, samples: usize, out: OutArgs) -> Result<()> {
    use rayon::prelude::*;
    if !(kappa > 0.0 && a_min > 0.0 && a_max > a_min && a_max < kappa / 2.0) {
        return Err(SolitonError::InvalidParameter(format!(
            "sweep needs 0 < a_min < a_max < kappa/2; got a in [{a_min}, {a_max}], kappa = {kappa}"
        )));
    }
    if samples < 2 {
        return Err(SolitonError::InvalidParameter(
            "need at least 2 samples".into(),
        ));
    }
    let grid: Vec<f64> = (0..samples)
        .map(|i| a_min + (a_max - a_min) * i as f64 / (samples as f64 - 1.0))
        .collect();
    let rows: Vec<Result<String>> = grid
        .par_iter()
        .map(|&a| {
            let cert = solve_mu(m, kappa, a)?;
            let pr = SolitonProfile::new(m, kappa, -1.0, cert.root, 0.0, a, f64::INFINITY)?;
            let slope = pr.phi_prime(a)?;
            Ok(format!(
                "{a:.16e},{:.16e},{:.16e},{},{:.16e},{slope:.16e}",
                cert.root, cert.lower_bracket, cert.sign_changes, cert.residual
            ))
        })
        .collect();
    let mut text = String::from("a,mu,lower_bracket,sign_changes,residual,slope_at_a\n");
    for row in rows {
        text.push_str(&row?);
        text.push('\n');
    }
    match &out.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("sweep.csv"), text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
