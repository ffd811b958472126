use serde_json::json;
use thiserror::Error;

use freeprob::characterize::{
    regression_constants, solve_thm1, solve_thm2, verify_lemma33, verify_prop31, verify_prop32, verify_thm1_with,
    verify_thm2_with, x_plus_thm1, x_plus_thm2, Theorem, TheoremParams, THM1_TOL, THM2_TOL,
};
use freeprob::freemoments::moments_from_cumulants;
use freeprob::laws::{density_csv, density_grid, Law, MomentMethod};
use freeprob::quadrature::DEFAULT_NODES;
use freeprob::transforms::{free_add, free_mult, r_from_moments, s_from_moments, MomentSeries};
use randmat::{esd_distance, mc_regression_check, x_spectrum, McConfig};

use crate::args::{Command, ConvOp, Format, LawSpec, SimulateArgs, Target, VerifyArgs};
use crate::report::{max_rel_diff, Report};

/// Relative tolerance between series and quadrature moments.
pub const MOMENT_TOL: f64 = 1e-7;
pub const MASS_TOL: f64 = 1e-8;
/// Relative tolerance for `convolve --expect`.
pub const CONVOLVE_TOL: f64 = 1e-8;
/// Relative tolerance of the solver round trip.
pub const SOLVE_TOL: f64 = 1e-12;
/// Kolmogorov distance allowed for `simulate --esd`.
pub const ESD_TOL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] freeprob::Error),
    #[error(transparent)]
    Randmat(#[from] randmat::Error),
}

pub enum Output {
    Report(Report),
    Csv(String),
}

pub fn execute(command: &Command, format: Format, seed: u64) -> Result<Output, CliError> {
    if format == Format::Csv && !matches!(command, Command::Density { .. }) {
        return Err(CliError::Usage("csv output is only available for `density`".into()));
    }
    match command {
        Command::Density { law, points } => density(law, *points, format, seed),
        Command::Moments { law, n } => moments(law, *n, seed).map(Output::Report),
        Command::Convolve { op, a, b, n, expect } => convolve(*op, a, b, *n, expect.as_ref(), seed).map(Output::Report),
        Command::Solve { theorem, c, d, f } => solve(*theorem, *c, *d, *f, seed).map(Output::Report),
        Command::Verify(args) => verify(args, seed).map(Output::Report),
        Command::Simulate(args) => simulate(args, seed).map(Output::Report),
    }
}

fn density(law: &LawSpec, points: usize, format: Format, seed: u64) -> Result<Output, CliError> {
    if format == Format::Csv {
        return Ok(Output::Csv(density_csv(&law.law, points)?));
    }
    let grid = density_grid(&law.law, points)?;
    let mut rep = Report::new("density", seed);
    rep.param("law", &law.text).param("points", points);
    let mass = law.law.discretize(DEFAULT_NODES)?.total_mass();
    rep.check("total_mass", (mass - 1.0).abs(), MASS_TOL);
    rep.data = json!({
        "atoms": law.law.atoms(),
        "x": grid.iter().map(|p| p.0).collect::<Vec<_>>(),
        "density": grid.iter().map(|p| p.1).collect::<Vec<_>>(),
    });
    Ok(Output::Report(rep))
}

fn moments(law: &LawSpec, n: usize, seed: u64) -> Result<Report, CliError> {
    let series = law.law.moments(n, MomentMethod::Series)?;
    let quad = law.law.moments(n, MomentMethod::Quadrature)?;
    let mut rep = Report::new("moments", seed);
    rep.param("law", &law.text).param("n", n);
    rep.check("series_vs_quadrature", max_rel_diff(&quad, &series), MOMENT_TOL);
    rep.data = json!({ "series": series, "quadrature": quad });
    Ok(rep)
}

fn convolve(op: ConvOp, a: &LawSpec, b: &LawSpec, n: usize, expect: Option<&LawSpec>, seed: u64) -> Result<Report, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let m = match op {
        ConvOp::Add => {
            let ra = r_from_moments(&MomentSeries::from_moments(&a.law.moments(n, MomentMethod::Series)?))?;
            let rb = r_from_moments(&MomentSeries::from_moments(&b.law.moments(n, MomentMethod::Series)?))?;
            moments_from_cumulants(&free_add(&ra, &rb).cumulants())
        }
        ConvOp::Mult => {
            let sa = s_from_moments(&MomentSeries::from_moments(&a.law.moments(n + 1, MomentMethod::Series)?))?;
            let sb = s_from_moments(&MomentSeries::from_moments(&b.law.moments(n + 1, MomentMethod::Series)?))?;
            free_mult(&sa, &sb, n)?.moments().to_vec()
        }
    };
    let mut rep = Report::new("convolve", seed);
    rep.param("op", if op == ConvOp::Add { "add" } else { "mult" }).param("a", &a.text).param("b", &b.text).param("n", n);
    let mut data = json!({ "moments": m });
    if let Some(e) = expect {
        let want = e.law.moments(n, MomentMethod::Series)?;
        rep.param("expect", &e.text);
        rep.check("matches_expected", max_rel_diff(&m, &want), CONVOLVE_TOL);
        data["expected"] = json!(want);
    }
    rep.data = data;
    Ok(rep)
}

fn theorem_number(t: Theorem) -> u8 {
    match t {
        Theorem::T1 => 1,
        Theorem::T2 => 2,
    }
}

fn solve(theorem: Theorem, c: f64, d: f64, f: f64, seed: u64) -> Result<Report, CliError> {
    let p = match theorem {
        Theorem::T1 => solve_thm1(c, d, f)?,
        Theorem::T2 => solve_thm2(c, d, f)?,
    };
    let mut rep = Report::new("solve", seed);
    rep.param("theorem", theorem_number(theorem)).param("c", c).param("d", d).param("F", f);
    let (c2, d2) = regression_constants(p.sigma, p.theta, p.alpha, theorem)?;
    let back = [c2, d2, p.f_closed()];
    rep.check("constants_roundtrip", max_rel_diff(&back, &[c, d, f]), SOLVE_TOL);
    let x_plus = match theorem {
        Theorem::T1 => x_plus_thm1(c, d, f),
        Theorem::T2 => x_plus_thm2(c, d, f),
    };
    rep.data = json!({ "lambda": p.lambda, "alpha": p.alpha, "sigma": p.sigma, "theta": p.theta, "x_plus": x_plus });
    Ok(rep)
}

fn verify(args: &VerifyArgs, seed: u64) -> Result<Report, CliError> {
    let order = args.order.unwrap_or(args.target.default_order());
    let (name, ir) = match args.target {
        Target::Thm1 => {
            let p = TheoremParams::new(args.sigma, args.theta, args.alpha)?;
            ("thm1", verify_thm1_with(&p, order, args.tol.unwrap_or(THM1_TOL))?)
        }
        Target::Thm2 => {
            let p = TheoremParams::new(args.sigma, args.theta, args.alpha)?;
            ("thm2", verify_thm2_with(&p, order, args.tol.unwrap_or(THM2_TOL))?)
        }
        Target::Prop31 => ("prop31", verify_prop31(args.sigma, args.theta, args.alpha, order)?),
        Target::Prop32 => ("prop32", verify_prop32(args.theta, args.alpha)?),
        Target::Lemma33 => ("lemma33", verify_lemma33(args.lambda.unwrap_or(args.sigma + args.theta), args.alpha, order)?),
    };
    let mut rep = Report::new(&format!("verify {name}"), seed);
    match args.target {
        Target::Prop32 => {
            rep.param("theta", args.theta).param("alpha", args.alpha);
        }
        Target::Lemma33 => {
            rep.param("lambda", args.lambda.unwrap_or(args.sigma + args.theta)).param("alpha", args.alpha).param("order", order);
        }
        _ => {
            rep.param("sigma", args.sigma).param("theta", args.theta).param("alpha", args.alpha).param("order", order);
        }
    }
    if let Some(t) = args.tol {
        rep.param("tol", t);
    }
    rep.extend_from(&ir);
    let diagnostics: serde_json::Map<String, serde_json::Value> =
        ir.diagnostics.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    if !diagnostics.is_empty() {
        rep.data = json!({ "diagnostics": diagnostics });
    }
    Ok(rep)
}

fn simulate(args: &SimulateArgs, seed: u64) -> Result<Report, CliError> {
    let p = TheoremParams::new(args.sigma, args.theta, args.alpha)?;
    let mut cfg = McConfig::new(args.dim, args.trials, args.theorem, seed);
    cfg.n_max_moment = args.moments;
    cfg.c_abs = args.c_abs;
    cfg.spectrum = args.spectrum.into();
    let mc = mc_regression_check(&p, &cfg)?;
    let mut rep = Report::new("simulate", seed);
    rep.param("theorem", theorem_number(args.theorem))
        .param("sigma", args.sigma)
        .param("theta", args.theta)
        .param("alpha", args.alpha)
        .param("dim", args.dim)
        .param("trials", args.trials)
        .param("moments", args.moments)
        .param("spectrum", cfg.spectrum)
        .param("c_abs", args.c_abs);
    for e in &mc.entries {
        rep.identities.push(crate::report::IdentityLine {
            name: format!("{}_{}", e.name, e.moment),
            residual_max: e.estimate.abs(),
            pass: e.pass,
        });
    }
    let mut data = json!({ "c": mc.c, "d": mc.d, "entries": mc.entries });
    if args.esd {
        let eigs = x_spectrum(&p, args.dim, cfg.spectrum, seed)?;
        let to_sigma = esd_distance(&eigs, &Law::poisson(args.sigma, args.alpha)?);
        let to_theta = esd_distance(&eigs, &Law::poisson(args.theta, args.alpha)?);
        rep.check("x_esd_to_nu_sigma_alpha", to_sigma, ESD_TOL);
        data["esd"] = json!({ "to_nu_sigma_alpha": to_sigma, "to_nu_theta_alpha": to_theta });
    }
    rep.data = data;
    Ok(rep)
}
