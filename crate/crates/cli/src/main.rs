//! `ssci` — adaptive confidence intervals for a scalar parameter when
//! some nuisance parameters have known signs.
//!
//! Subcommands cover interval construction from an estimates file,
//! critical-value solving and surface evaluation, surface refitting,
//! simulation studies, coverage scans, and a bootstrap factorial study.
//! Every command is deterministic given its flags: rerunning with the
//! same seed produces byte-identical output, and each output file
//! carries the configuration needed to reproduce it.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.
//! `SSCI_THREADS` caps the worker-thread count.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ssci_core::ci::{ci_from_estimates, CiSide, EstimateBundle, Interval, Method};
use ssci_core::critval::{solve_c_one_sided, solve_cu_optimal, Level};
use ssci_core::gauss::{derive_seed, McConfig, TildeOmega, DEFAULT_DRAWS};
use ssci_core::regress::ingest_csv;
use ssci_core::studies;
use ssci_core::surface::{builtin_surface, fit_surface, save_surface, SurfaceSample, SurfaceTarget};
use ssci_core::{Error, Result};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "ssci", version, about = "Short and simple adaptive confidence intervals")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a confidence interval from an estimates file.
    Ci(CiArgs),
    /// Solve or evaluate interval critical values.
    Critval(CritvalArgs),
    /// Refit a critical-value response surface from exact solves.
    SurfaceFit(SurfaceFitArgs),
    /// Run a simulation study and write it as CSV.
    Simulate(SimulateArgs),
    /// Scan coverage of the surface-approximated interval over a grid.
    CoverageScan(CoverageScanArgs),
    /// Bootstrap study of a 2x2 factorial dataset.
    Bootstrap(BootstrapArgs),
}

/// Interval level shared by every subcommand.
#[derive(Args)]
struct LevelArgs {
    /// Allowed non-coverage rate of the interval.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Share of alpha reserved for the fallback bound (default alpha/10).
    #[arg(long)]
    gamma: Option<f64>,
}

impl LevelArgs {
    fn level(&self) -> Result<Level> {
        match self.gamma {
            Some(g) => Level::new(self.alpha, g),
            None => Level::with_default_gamma(self.alpha),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Upper,
    Lower,
    TwoSided,
}

impl SideArg {
    fn to_side(self) -> CiSide {
        match self {
            SideArg::Upper => CiSide::Upper,
            SideArg::Lower => CiSide::Lower,
            SideArg::TwoSided => CiSide::TwoSided,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SideArg::Upper => "upper",
            SideArg::Lower => "lower",
            SideArg::TwoSided => "two-sided",
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MethodArg {
    /// Evaluate the built-in response surfaces.
    Surface,
    /// Solve critical values by exact Monte Carlo (requires --seed).
    ExactMc,
}

/// Builds a Monte Carlo configuration, insisting on an explicit seed.
fn mc_config(seed: Option<u64>, draws: Option<u64>, what: &str) -> Result<McConfig> {
    let seed = seed.ok_or_else(|| Error::invalid(format!("--seed is required for {what}")))?;
    McConfig::new(draws.unwrap_or(DEFAULT_DRAWS), seed)
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serializing output: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ci
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// JSON file with fields b_hat, d_hat, sigma_hat, n.
    #[arg(long)]
    estimates: PathBuf,
    /// Which interval to form.
    #[arg(long, value_enum)]
    side: SideArg,
    /// Critical-value method.
    #[arg(long, value_enum, default_value_t = MethodArg::Surface)]
    method: MethodArg,
    /// Seed for exact Monte Carlo critical values.
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per Monte Carlo solve.
    #[arg(long)]
    draws: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// On-disk estimates format for `ci --estimates`.
#[derive(Deserialize)]
struct EstimatesFile {
    /// Point estimate of the parameter of interest.
    b_hat: f64,
    /// Point estimates of the sign-restricted controls (may be empty).
    #[serde(default)]
    d_hat: Vec<f64>,
    /// Estimated covariance of `sqrt(n) (b_hat, d_hat)`.
    sigma_hat: Vec<Vec<f64>>,
    /// Sample size behind the estimates.
    n: u64,
}

#[derive(Serialize)]
struct CiOutput {
    schema_version: u32,
    alpha: f64,
    gamma: f64,
    side: &'static str,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    draws: Option<u64>,
    interval: Interval,
}

fn run_ci(args: &CiArgs) -> Result<()> {
    let level = args.level.level()?;
    let text = std::fs::read_to_string(&args.estimates)?;
    let parsed: EstimatesFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("estimates file: {e}")))?;
    let bundle = EstimateBundle::new(parsed.b_hat, parsed.d_hat, parsed.sigma_hat, parsed.n)?;
    let (method, method_name, seed, draws) = match args.method {
        MethodArg::Surface => (Method::Surface, "surface", None, None),
        MethodArg::ExactMc => {
            let cfg = mc_config(args.seed, args.draws, "--method exact-mc")?;
            let (seed, draws) = (cfg.seed(), cfg.draws());
            (Method::ExactMc(cfg), "exact_mc", Some(seed), Some(draws))
        }
    };
    let interval = ci_from_estimates(&bundle, level, args.side.to_side(), &method)?;
    emit_json(
        args.out.as_deref(),
        &CiOutput {
            schema_version: SCHEMA_VERSION,
            alpha: level.alpha(),
            gamma: level.gamma(),
            side: args.side.name(),
            method: method_name,
            seed,
            draws,
            interval,
        },
    )
}

// ---------------------------------------------------------------------------
// critval
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CritvalArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Control correlation for the one-sided problem.
    #[arg(long, conflicts_with_all = ["omega12", "omega13", "omega23"])]
    omega: Option<f64>,
    /// Lower-arm projection correlation of the two-sided problem.
    #[arg(long, requires = "omega13")]
    omega12: Option<f64>,
    /// Upper-arm projection correlation of the two-sided problem.
    #[arg(long, requires = "omega12")]
    omega13: Option<f64>,
    /// Cross correlation (defaults to the representative midpoint
    /// omega12 * omega13).
    #[arg(long, requires = "omega12")]
    omega23: Option<f64>,
    /// Solve by exact Monte Carlo (requires --seed).
    #[arg(long, conflicts_with = "surface")]
    exact: bool,
    /// Evaluate the built-in response surface (the default).
    #[arg(long)]
    surface: bool,
    /// Seed for exact solves.
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per exact solve.
    #[arg(long)]
    draws: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CritvalOutput {
    schema_version: u32,
    alpha: f64,
    gamma: f64,
    mode: &'static str,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega13: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega23: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    draws: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trunc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_length_std_error: Option<f64>,
}

fn run_critval(args: &CritvalArgs) -> Result<()> {
    let level = args.level.level()?;
    let mut output = CritvalOutput {
        schema_version: SCHEMA_VERSION,
        alpha: level.alpha(),
        gamma: level.gamma(),
        mode: "",
        method: if args.exact { "exact_mc" } else { "surface" },
        omega: None,
        omega12: None,
        omega13: None,
        omega23: None,
        seed: None,
        draws: None,
        c: None,
        std_error: None,
        c_lower: None,
        c_upper: None,
        trunc: None,
        expected_length: None,
        expected_length_std_error: None,
    };

    match (args.omega, args.omega12, args.omega13) {
        (Some(w), None, None) => {
            output.mode = "one_sided";
            output.omega = Some(w);
            if args.exact {
                let cfg = mc_config(args.seed, args.draws, "--exact")?;
                output.seed = Some(cfg.seed());
                output.draws = Some(cfg.draws());
                let solved = solve_c_one_sided(level, w, &cfg)?;
                output.c = Some(solved.value);
                output.std_error = Some(solved.std_error);
            } else {
                let surf = builtin_surface(level, SurfaceTarget::COneSided)?;
                output.c = Some(surf.eval_one(w)?);
            }
            output.trunc = Some(level.z_one_sided_trunc());
        }
        (None, Some(w12), Some(w13)) => {
            output.mode = "two_sided";
            let tw = match args.omega23 {
                Some(w23) => TildeOmega::new(w12, w13, w23)?,
                None => TildeOmega::clipped(w12, w13, w12 * w13)?,
            };
            output.omega12 = Some(tw.w12());
            output.omega13 = Some(tw.w13());
            output.omega23 = Some(tw.w23());
            if args.exact {
                let cfg = mc_config(args.seed, args.draws, "--exact")?;
                output.seed = Some(cfg.seed());
                output.draws = Some(cfg.draws());
                let sol = solve_cu_optimal(level, &tw, &cfg)?;
                output.c_lower = Some(sol.pair.c_lower);
                output.c_upper = Some(sol.pair.c_upper);
                output.expected_length = Some(sol.objective.value);
                output.expected_length_std_error = Some(sol.objective.std_error);
            } else {
                let surf = builtin_surface(level, SurfaceTarget::CUpperTwoSided)?;
                output.c_upper = Some(surf.eval_two(tw.w12(), tw.w13())?);
                output.c_lower = Some(surf.eval_two(tw.w13(), tw.w12())?);
            }
            output.trunc = Some(level.z_two_sided_trunc());
        }
        _ => {
            return Err(Error::invalid(
                "pass either --omega (one-sided) or --omega12 with --omega13 (two-sided)",
            ))
        }
    }
    emit_json(args.out.as_deref(), &output)
}

// ---------------------------------------------------------------------------
// surface-fit
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    /// One-sided critical value as a function of omega.
    COneSided,
    /// Upper two-sided critical value over (omega12, omega13).
    CUpperTwoSided,
}

impl TargetArg {
    fn to_target(self) -> SurfaceTarget {
        match self {
            TargetArg::COneSided => SurfaceTarget::COneSided,
            TargetArg::CUpperTwoSided => SurfaceTarget::CUpperTwoSided,
        }
    }
}

#[derive(Args)]
struct SurfaceFitArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Which surface to fit.
    #[arg(long, value_enum)]
    target: TargetArg,
    /// Grid step of the fitting design (default 0.01 one-sided, 0.1
    /// two-sided).
    #[arg(long)]
    step: Option<f64>,
    /// Seed for the exact solves.
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per exact solve.
    #[arg(long)]
    draws: Option<u64>,
    /// Write the fitted surface (text format) here.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SurfaceFitOutput {
    schema_version: u32,
    target: &'static str,
    alpha: f64,
    gamma: f64,
    seed: u64,
    draws: u64,
    step: f64,
    n_samples: usize,
    r_squared: f64,
    max_abs_residual: f64,
    out: String,
}

fn run_surface_fit(args: &SurfaceFitArgs) -> Result<()> {
    use rayon::prelude::*;

    let level = args.level.level()?;
    let target = args.target.to_target();
    let cfg = mc_config(args.seed, args.draws.or(Some(500_000)), "surface-fit")?;
    let step = args.step.unwrap_or(match target {
        SurfaceTarget::COneSided => 0.01,
        SurfaceTarget::CUpperTwoSided => 0.1,
    });

    let samples: Vec<SurfaceSample> = match target {
        SurfaceTarget::COneSided => studies::scan_grid(step)?
            .par_iter()
            .enumerate()
            .map(|(i, &w)| -> Result<SurfaceSample> {
                let point_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[i as u64]));
                let c = solve_c_one_sided(level, w, &point_cfg)?.value;
                Ok(SurfaceSample {
                    coords: (w, 0.0),
                    value: c,
                })
            })
            .collect::<Result<_>>()?,
        SurfaceTarget::CUpperTwoSided => studies::scan_grid_two_sided(step)?
            .par_iter()
            .enumerate()
            .map(|(i, &(w12, w13))| -> Result<SurfaceSample> {
                let tw = TildeOmega::clipped(w12, w13, w12 * w13)?;
                let point_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[i as u64]));
                let sol = solve_cu_optimal(level, &tw, &point_cfg)?;
                Ok(SurfaceSample {
                    coords: (w12, w13),
                    value: sol.pair.c_upper,
                })
            })
            .collect::<Result<_>>()?,
    };

    let (surface, report) = fit_surface(level, target, &samples)?;
    save_surface(&surface, &args.out)?;
    emit_json(
        None,
        &SurfaceFitOutput {
            schema_version: SCHEMA_VERSION,
            target: target.as_str(),
            alpha: level.alpha(),
            gamma: level.gamma(),
            seed: cfg.seed(),
            draws: cfg.draws(),
            step,
            n_samples: report.n_samples,
            r_squared: report.r_squared,
            max_abs_residual: report.max_abs_residual,
            out: args.out.display().to_string(),
        },
    )
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum SimTarget {
    /// Expected excess length against the control correlation.
    ExcessLengthOmega,
    /// Expected excess length against the distance from the restriction
    /// boundary.
    ExcessLengthDelta,
    /// Optimized two-sided expected length over the correlation square.
    LengthSurface,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Which study to run.
    #[arg(long, value_enum)]
    target: SimTarget,
    /// Fixed control correlation for the delta curve.
    #[arg(long, default_value_t = 0.5)]
    omega: f64,
    /// Simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per grid point.
    #[arg(long)]
    draws: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct SimulateOutput {
    schema_version: u32,
    target: &'static str,
    seed: u64,
    draws: u64,
    out: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivity_out: Option<String>,
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let level = args.level.level()?;
    let cfg = mc_config(args.seed, args.draws.or(Some(200_000)), "simulate")?;
    let mut status = SimulateOutput {
        schema_version: SCHEMA_VERSION,
        target: "",
        seed: cfg.seed(),
        draws: cfg.draws(),
        out: args.out.display().to_string(),
        sensitivity_out: None,
    };
    match args.target {
        SimTarget::ExcessLengthOmega => {
            status.target = "excess-length-omega";
            let curve =
                studies::excess_length_curve_omega(level, &studies::default_omega_grid(), &cfg)?;
            curve.write_csv(&args.out)?;
        }
        SimTarget::ExcessLengthDelta => {
            status.target = "excess-length-delta";
            let curve = studies::excess_length_curve_delta(
                level,
                args.omega,
                &studies::default_delta_grid(),
                &cfg,
            )?;
            curve.write_csv(&args.out)?;
        }
        SimTarget::LengthSurface => {
            status.target = "length-surface";
            let study = studies::expected_length_surface(
                level,
                &studies::default_surface_grid(),
                &studies::default_sensitivity_points(),
                &cfg,
            )?;
            study.write_csv(&args.out)?;
            let sens_path = args.out.with_extension("sensitivity.csv");
            study.write_sensitivity_csv(&sens_path)?;
            status.sensitivity_out = Some(sens_path.display().to_string());
        }
    }
    emit_json(None, &status)
}

// ---------------------------------------------------------------------------
// coverage-scan
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, ValueEnum)]
enum ScanSide {
    OneSided,
    TwoSided,
}

#[derive(Args)]
struct CoverageScanArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Which interval family to scan.
    #[arg(long, value_enum)]
    side: ScanSide,
    /// Grid step in each correlation coordinate.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Draws per grid point.
    #[arg(long)]
    draws: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ScanOutput {
    schema_version: u32,
    side: &'static str,
    step: f64,
    seed: u64,
    draws: u64,
    min_coverage: f64,
    argmin: Vec<f64>,
    out: String,
}

fn run_coverage_scan(args: &CoverageScanArgs) -> Result<()> {
    let level = args.level.level()?;
    let cfg = mc_config(args.seed, args.draws.or(Some(1_000_000)), "coverage-scan")?;
    let (side, scan) = match args.side {
        ScanSide::OneSided => (
            "one-sided",
            studies::coverage_scan_one_sided(level, &studies::scan_grid(args.step)?, &cfg)?,
        ),
        ScanSide::TwoSided => (
            "two-sided",
            studies::coverage_scan_two_sided(
                level,
                &studies::scan_grid_two_sided(args.step)?,
                &cfg,
            )?,
        ),
    };
    scan.write_csv(&args.out)?;
    emit_json(
        None,
        &ScanOutput {
            schema_version: SCHEMA_VERSION,
            side,
            step: args.step,
            seed: cfg.seed(),
            draws: cfg.draws(),
            min_coverage: scan.min_coverage,
            argmin: scan.argmin,
            out: args.out.display().to_string(),
        },
    )
}

// ---------------------------------------------------------------------------
// bootstrap
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    level: LevelArgs,
    /// Input CSV with the outcome and two binary treatment columns.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated outcome,treatment1,treatment2 column names.
    #[arg(long, default_value = "y,t1,t2")]
    schema: String,
    /// Number of bootstrap replications.
    #[arg(long, default_value_t = 2000)]
    reps: u64,
    /// Resampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Re-centering shift for a treatment coefficient, as NAME=SHIFT;
    /// repeatable.
    #[arg(long = "recenter", value_name = "NAME=SHIFT")]
    recenter: Vec<String>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct BootstrapOutput<'a> {
    schema_version: u32,
    reps: u64,
    seed: u64,
    n_rows: usize,
    rows: &'a [studies::BootstrapRow],
    out: String,
}

fn parse_schema(schema: &str) -> Result<(String, String, String)> {
    let parts: Vec<&str> = schema.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [y, t1, t2]
            if !y.is_empty() && !t1.is_empty() && !t2.is_empty() && t1 != t2 && y != t1
                && y != t2 =>
        {
            Ok((y.to_string(), t1.to_string(), t2.to_string()))
        }
        _ => Err(Error::invalid(format!(
            "--schema must name three distinct columns as outcome,treatment1,treatment2, \
             got {schema:?}"
        ))),
    }
}

fn parse_recenter(items: &[String]) -> Result<Vec<(String, f64)>> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                Error::invalid(format!("--recenter expects NAME=SHIFT, got {item:?}"))
            })?;
            let shift: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("--recenter shift {value:?} is not a number")))?;
            Ok((name.trim().to_string(), shift))
        })
        .collect()
}

fn run_bootstrap(args: &BootstrapArgs) -> Result<()> {
    let level = args.level.level()?;
    let seed = args
        .seed
        .ok_or_else(|| Error::invalid("--seed is required for bootstrap"))?;
    let (outcome, t1, t2) = parse_schema(&args.schema)?;
    let recenter = parse_recenter(&args.recenter)?;
    let data = ingest_csv(&args.data, &[&outcome, &t1, &t2])?;
    let study = studies::bootstrap_study(
        &data, &outcome, &t1, &t2, level, args.reps, seed, &recenter,
    )?;
    study.write_csv(&args.out)?;
    emit_json(
        None,
        &BootstrapOutput {
            schema_version: SCHEMA_VERSION,
            reps: args.reps,
            seed,
            n_rows: data.n_rows(),
            rows: &study.rows,
            out: args.out.display().to_string(),
        },
    )
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

/// Applies the `SSCI_THREADS` worker cap before any parallel work runs.
fn init_threads() -> Result<()> {
    match std::env::var("SSCI_THREADS") {
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    Error::invalid(format!("SSCI_THREADS must be a positive integer, got {raw:?}"))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))
        }
        Err(_) => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<()> {
    init_threads()?;
    match &cli.cmd {
        Cmd::Ci(args) => run_ci(args),
        Cmd::Critval(args) => run_critval(args),
        Cmd::SurfaceFit(args) => run_surface_fit(args),
        Cmd::Simulate(args) => run_simulate(args),
        Cmd::CoverageScan(args) => run_coverage_scan(args),
        Cmd::Bootstrap(args) => run_bootstrap(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}
