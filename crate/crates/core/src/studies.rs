//! Numerical studies: expected-excess-length curves, the two-sided
//! expected-length surface, coverage scans for the response surfaces, and
//! a bootstrap-calibrated factorial study.
//!
//! Every function here is deterministic given its seed and configuration:
//! grid points and bootstrap replications derive independent seeds from
//! the base seed, parallel results are collected in input order, and the
//! CSV renderings format floats in shortest round-trip form. Each study
//! carries its generating configuration as metadata lines that the CSV
//! writers emit as `# key value` headers, so any output file can be
//! reproduced from its own header alone.
//!
//! Monte Carlo estimates always come with standard errors; reference
//! comparisons are made in 3-standard-error bands.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ci::{ci_from_estimates, CiSide, Interval, Method};
use crate::critval::{
    coverage_one_sided, coverage_two_sided, solve_c_one_sided, solve_cu_optimal, Level,
};
use crate::error::{Error, Result};
use crate::gauss::{derive_seed, sample_bivariate, McConfig, TildeOmega};
use crate::regress::{
    factorial_design, ols_fit, Dataset, FactorialMode, Formula, HcFlavor, FACTORIAL_CONST,
    FACTORIAL_T1T2, FACTORIAL_T1_ONLY, FACTORIAL_T2_ONLY,
};
use crate::surface::{builtin_surface, SurfaceTarget};

// Stream tags separating the derived seeds of different study stages.
const TAG_CURVE_SOLVE: u64 = 1;
const TAG_CURVE_EVAL: u64 = 2;
const TAG_DELTA_CURVE: u64 = 3;
const TAG_SURFACE_POINT: u64 = 4;
const TAG_SENSITIVITY: u64 = 5;
const TAG_SCAN_ONE: u64 = 6;
const TAG_SCAN_TWO: u64 = 7;
const TAG_BOOTSTRAP: u64 = 8;
const TAG_SYNTHETIC: u64 = 9;

// ---------------------------------------------------------------------------
// Metadata / CSV plumbing
// ---------------------------------------------------------------------------

type Meta = Vec<(String, String)>;

fn base_meta(kind: &str, level: Level, cfg: &McConfig) -> Meta {
    vec![
        ("study".into(), kind.into()),
        ("alpha".into(), format!("{:?}", level.alpha())),
        ("gamma".into(), format!("{:?}", level.gamma())),
        ("seed".into(), cfg.seed().to_string()),
        ("draws".into(), cfg.draws().to_string()),
    ]
}

fn render_csv(meta: &Meta, header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} {v}");
    }
    let _ = writeln!(out, "{header}");
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Expected-excess-length curves
// ---------------------------------------------------------------------------

/// One abscissa point of a length curve: the adaptive interval's expected
/// excess length (with its Monte Carlo standard error) next to the two
/// reference curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthPoint {
    pub x: f64,
    pub adaptive: f64,
    pub adaptive_se: f64,
    /// Excess length of the standard interval (constant `z_{1-alpha}`).
    pub standard: f64,
    /// Excess length of the interval that is optimal when the restricted
    /// parameters sit exactly at the boundary.
    pub origin_optimal: f64,
}

/// Expected-excess-length curve over a grid of `omega` or `delta`
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthCurve {
    /// Name of the abscissa variable (`omega` or `delta`).
    pub abscissa: String,
    pub points: Vec<LengthPoint>,
    meta: Meta,
}

impl LengthCurve {
    /// Renders the curve as CSV with `# key value` metadata headers.
    pub fn to_csv_string(&self) -> String {
        render_csv(
            &self.meta,
            &format!("{},adaptive,adaptive_se,standard,origin_optimal", self.abscissa),
            self.points.iter().map(|p| {
                format!(
                    "{:?},{:?},{:?},{:?},{:?}",
                    p.x, p.adaptive, p.adaptive_se, p.standard, p.origin_optimal
                )
            }),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }
}

fn check_grid(grid: &[f64], name: &str, max_exclusive: Option<f64>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("{name} grid must be non-empty")));
    }
    if grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::invalid(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    let lo = grid[0];
    let hi = *grid.last().unwrap();
    if lo < 0.0 || max_exclusive.is_some_and(|m| hi >= m) {
        return Err(Error::invalid(format!("{name} grid out of range")));
    }
    Ok(())
}

/// Mean and standard error of `min(trunc, z + shift + c)` over a draw
/// set.
fn excess_mean_se(z2t: &[f64], trunc: f64, shift: f64, c: f64) -> (f64, f64) {
    let n = z2t.len() as f64;
    let (sum, sumsq) = z2t
        .par_chunks(65_536)
        .map(|chunk| {
            let mut s = 0.0;
            let mut s2 = 0.0;
            for &z in chunk {
                let v = trunc.min(z + shift + c);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Expected excess length of the adaptive one-sided interval at the
/// restriction boundary, as a function of the explained correlation
/// `omega`. Also emits the two reference curves: the standard interval
/// (constant `z_{1-alpha}`) and the boundary-optimal interval
/// (`sqrt(1-omega) z_{1-alpha}`).
///
/// Critical values are solved exactly per grid point with seeds derived
/// from `cfg`.
pub fn excess_length_curve_omega(
    level: Level,
    grid: &[f64],
    cfg: &McConfig,
) -> Result<LengthCurve> {
    check_grid(grid, "omega", Some(1.0))?;
    let trunc = level.z_one_sided_trunc();
    let z_std = level.z_standard_one_sided();
    let points: Vec<LengthPoint> = grid
        .iter()
        .enumerate()
        .map(|(i, &w)| -> Result<LengthPoint> {
            if w == 0.0 {
                // No explanatory power: the interval is the standard one
                // and the excess length is a constant, so report it
                // exactly rather than as a mean over constant draws.
                return Ok(LengthPoint {
                    x: w,
                    adaptive: z_std,
                    adaptive_se: 0.0,
                    standard: z_std,
                    origin_optimal: z_std,
                });
            }
            let solve_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_CURVE_SOLVE, i as u64]));
            let c = solve_c_one_sided(level, w, &solve_cfg)?.value;
            let eval_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_CURVE_EVAL, i as u64]));
            let draws = sample_bivariate(w, &eval_cfg)?;
            let (adaptive, adaptive_se) = excess_mean_se(&draws.z2t, trunc, 0.0, c);
            Ok(LengthPoint {
                x: w,
                adaptive,
                adaptive_se,
                standard: z_std,
                origin_optimal: (1.0 - w).sqrt() * z_std,
            })
        })
        .collect::<Result<_>>()?;
    let mut meta = base_meta("excess-length-omega", level, cfg);
    meta.push(("n_points".into(), grid.len().to_string()));
    Ok(LengthCurve {
        abscissa: "omega".into(),
        points,
        meta,
    })
}

/// Expected excess length of the adaptive one-sided interval at a fixed
/// `omega`, as a function of the distance `delta` of the restricted mean
/// from its boundary. The adaptive curve rises from its boundary value
/// toward the hard ceiling `z_{1-alpha+gamma}`; the references are the
/// constant standard interval and the boundary-optimal interval, whose
/// excess length grows linearly as `sqrt(omega) delta +
/// sqrt(1-omega) z_{1-alpha}`.
pub fn excess_length_curve_delta(
    level: Level,
    omega: f64,
    grid: &[f64],
    cfg: &McConfig,
) -> Result<LengthCurve> {
    check_grid(grid, "delta", None)?;
    let trunc = level.z_one_sided_trunc();
    let z_std = level.z_standard_one_sided();
    let solve_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_DELTA_CURVE, 0]));
    let c = solve_c_one_sided(level, omega, &solve_cfg)?.value;
    let eval_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_DELTA_CURVE, 1]));
    // Common random numbers across the delta grid: one draw set serves
    // every point, so the estimated curve is smooth in delta.
    let draws = sample_bivariate(omega, &eval_cfg)?;
    let root_w = omega.sqrt();
    let points: Vec<LengthPoint> = grid
        .iter()
        .map(|&d| {
            let (adaptive, adaptive_se) = excess_mean_se(&draws.z2t, trunc, root_w * d, c);
            LengthPoint {
                x: d,
                adaptive,
                adaptive_se,
                standard: z_std,
                origin_optimal: root_w * d + (1.0 - omega).sqrt() * z_std,
            }
        })
        .collect();
    let mut meta = base_meta("excess-length-delta", level, cfg);
    meta.push(("omega".into(), format!("{omega:?}")));
    meta.push(("n_points".into(), grid.len().to_string()));
    Ok(LengthCurve {
        abscissa: "delta".into(),
        points,
        meta,
    })
}

/// Desk-scale `omega` grid: `{0, 0.01, ..., 0.99}` (a thousandth-step
/// grid resolves nothing extra at desk scale; this subsamples tenfold).
pub fn default_omega_grid() -> Vec<f64> {
    (0..100).map(|i| i as f64 / 100.0).collect()
}

/// Default `delta` grid: `{0, 0.25, ..., 8}` plus a saturation probe at
/// 50.
pub fn default_delta_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=32).map(|i| i as f64 * 0.25).collect();
    g.push(50.0);
    g
}

// ---------------------------------------------------------------------------
// Two-sided expected-length surface
// ---------------------------------------------------------------------------

/// One `(w12, w13)` grid point of the expected-length surface, evaluated
/// at the representative cross-correlation `w23 = w12 w13` (the midpoint
/// of its feasible interval) with both critical values optimized there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceLengthPoint {
    pub w12: f64,
    pub w13: f64,
    pub w23: f64,
    pub expected_length: f64,
    pub se: f64,
    pub c_lower: f64,
    pub c_upper: f64,
}

/// Spread of the optimized expected length across the feasible `w23`
/// range at a fixed `(w12, w13)` — it stays below 0.03 everywhere on the
/// default grid, i.e., the surface is nearly invariant in `w23`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Omega23Spread {
    pub w12: f64,
    pub w13: f64,
    pub spread: f64,
}

/// Expected-length surface samples plus the `w23`-sensitivity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStudy {
    pub points: Vec<SurfaceLengthPoint>,
    pub sensitivity: Vec<Omega23Spread>,
    meta: Meta,
}

impl SurfaceStudy {
    pub fn to_csv_string(&self) -> String {
        render_csv(
            &self.meta,
            "w12,w13,w23,expected_length,se,c_lower,c_upper",
            self.points.iter().map(|p| {
                format!(
                    "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    p.w12, p.w13, p.w23, p.expected_length, p.se, p.c_lower, p.c_upper
                )
            }),
        )
    }

    pub fn sensitivity_csv_string(&self) -> String {
        render_csv(
            &self.meta,
            "w12,w13,spread",
            self.sensitivity
                .iter()
                .map(|s| format!("{:?},{:?},{:?}", s.w12, s.w13, s.spread)),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }

    pub fn write_sensitivity_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.sensitivity_csv_string())
    }
}

fn representative_triple(w12: f64, w13: f64) -> Result<TildeOmega> {
    TildeOmega::clipped(w12, w13, w12 * w13)
}

/// Solves the optimized expected length over a `(w12, w13)` grid at the
/// representative `w23`, and probes `w23` sensitivity at the requested
/// points by re-optimizing at the 10%, 50%, and 90% positions of the
/// feasible `w23` interval.
pub fn expected_length_surface(
    level: Level,
    grid: &[(f64, f64)],
    sensitivity_at: &[(f64, f64)],
    cfg: &McConfig,
) -> Result<SurfaceStudy> {
    if grid.is_empty() {
        return Err(Error::invalid("surface grid must be non-empty"));
    }
    let points: Vec<SurfaceLengthPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(w12, w13))| -> Result<SurfaceLengthPoint> {
            let tw = representative_triple(w12, w13)?;
            let point_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_SURFACE_POINT, i as u64]));
            let sol = solve_cu_optimal(level, &tw, &point_cfg)?;
            Ok(SurfaceLengthPoint {
                w12,
                w13,
                w23: tw.w23(),
                expected_length: sol.objective.value,
                se: sol.objective.std_error,
                c_lower: sol.pair.c_lower,
                c_upper: sol.pair.c_upper,
            })
        })
        .collect::<Result<_>>()?;

    let sensitivity: Vec<Omega23Spread> = sensitivity_at
        .par_iter()
        .enumerate()
        .map(|(i, &(w12, w13))| -> Result<Omega23Spread> {
            let (lo, hi) = crate::gauss::w23_interval(w12, w13);
            // The spread is a difference across probes, so all three share
            // one draw stream: common random numbers cancel most of the
            // root-finding noise that would otherwise swamp it.
            let probe_cfg =
                cfg.reseeded(derive_seed(cfg.seed(), &[TAG_SENSITIVITY, i as u64]));
            let mut lengths = Vec::new();
            for frac in [0.1, 0.5, 0.9] {
                let w23 = lo + frac * (hi - lo);
                let tw = TildeOmega::clipped(w12, w13, w23)?;
                lengths.push(solve_cu_optimal(level, &tw, &probe_cfg)?.objective.value);
            }
            let max = lengths.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(Omega23Spread {
                w12,
                w13,
                spread: max - min,
            })
        })
        .collect::<Result<_>>()?;

    let mut meta = base_meta("expected-length-surface", level, cfg);
    meta.push(("n_points".into(), grid.len().to_string()));
    meta.push(("n_sensitivity".into(), sensitivity_at.len().to_string()));
    Ok(SurfaceStudy {
        points,
        sensitivity,
        meta,
    })
}

/// Desk-scale surface grid: `{0, 0.1, ..., 0.9}` in each coordinate.
pub fn default_surface_grid() -> Vec<(f64, f64)> {
    let axis: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    axis.iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect()
}

/// Default `w23`-sensitivity probe points (interior, spanning weak to
/// strong projections).
pub fn default_sensitivity_points() -> Vec<(f64, f64)> {
    vec![(0.3, 0.3), (0.5, 0.5), (0.7, 0.3), (0.3, 0.7), (0.9, 0.9)]
}

// ---------------------------------------------------------------------------
// Coverage scans
// ---------------------------------------------------------------------------

/// One grid point of a coverage scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    /// `[omega]` for one-sided scans, `[w12, w13]` for two-sided ones.
    pub coords: Vec<f64>,
    pub coverage: f64,
    pub se: f64,
}

/// Coverage of the surface-approximated interval across a grid, with the
/// worst point singled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageScan {
    /// Coordinate column names.
    pub labels: Vec<String>,
    pub points: Vec<ScanPoint>,
    pub min_coverage: f64,
    /// Coordinates of the first grid point attaining the minimum.
    pub argmin: Vec<f64>,
    meta: Meta,
}

impl CoverageScan {
    pub fn to_csv_string(&self) -> String {
        render_csv(
            &self.meta,
            &format!("{},coverage,se", self.labels.join(",")),
            self.points.iter().map(|p| {
                let coords = p
                    .coords
                    .iter()
                    .map(|c| format!("{c:?}"))
                    .collect::<Vec<_>>()
                    .join(",");
                format!("{coords},{:?},{:?}", p.coverage, p.se)
            }),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }
}

fn finish_scan(labels: Vec<String>, points: Vec<ScanPoint>, meta: Meta) -> CoverageScan {
    let (mut min_coverage, mut argmin) = (f64::INFINITY, Vec::new());
    for p in &points {
        if p.coverage < min_coverage {
            min_coverage = p.coverage;
            argmin = p.coords.clone();
        }
    }
    CoverageScan {
        labels,
        points,
        min_coverage,
        argmin,
        meta,
    }
}

/// Coverage of the one-sided interval with surface critical values, at
/// the restriction boundary, over an `omega` grid.
pub fn coverage_scan_one_sided(
    level: Level,
    grid: &[f64],
    cfg: &McConfig,
) -> Result<CoverageScan> {
    check_grid(grid, "omega", Some(1.0))?;
    let surf = builtin_surface(level, SurfaceTarget::COneSided)?;
    let points: Vec<ScanPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &w)| -> Result<ScanPoint> {
            let c = surf.eval_one(w)?;
            let point_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_SCAN_ONE, i as u64]));
            let p = coverage_one_sided(level, w, c, 0.0, &point_cfg)?;
            Ok(ScanPoint {
                coords: vec![w],
                coverage: p.value,
                se: p.std_error,
            })
        })
        .collect::<Result<_>>()?;
    let mut meta = base_meta("coverage-scan-one-sided", level, cfg);
    meta.push(("method".into(), "surface".into()));
    meta.push(("n_points".into(), grid.len().to_string()));
    Ok(finish_scan(vec!["omega".into()], points, meta))
}

/// Coverage of the two-sided interval with surface critical values over
/// a `(w12, w13)` grid at the representative `w23 = w12 w13`.
pub fn coverage_scan_two_sided(
    level: Level,
    grid: &[(f64, f64)],
    cfg: &McConfig,
) -> Result<CoverageScan> {
    if grid.is_empty() {
        return Err(Error::invalid("scan grid must be non-empty"));
    }
    let surf = builtin_surface(level, SurfaceTarget::CUpperTwoSided)?;
    let points: Vec<ScanPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(w12, w13))| -> Result<ScanPoint> {
            let tw = representative_triple(w12, w13)?;
            let c_upper = surf.eval_two(w12, w13)?;
            let c_lower = surf.eval_two(w13, w12)?;
            let point_cfg = cfg.reseeded(derive_seed(cfg.seed(), &[TAG_SCAN_TWO, i as u64]));
            let p = coverage_two_sided(level, &tw, c_lower, c_upper, &point_cfg)?;
            Ok(ScanPoint {
                coords: vec![w12, w13],
                coverage: p.value,
                se: p.std_error,
            })
        })
        .collect::<Result<_>>()?;
    let mut meta = base_meta("coverage-scan-two-sided", level, cfg);
    meta.push(("method".into(), "surface".into()));
    meta.push(("n_points".into(), grid.len().to_string()));
    Ok(finish_scan(vec!["w12".into(), "w13".into()], points, meta))
}

/// Evenly spaced scan grid `{0, step, 2 step, ...}` strictly below 1.
pub fn scan_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return Err(Error::invalid(format!(
            "scan step must lie in (0, 1), got {step}"
        )));
    }
    let n = (1.0 / step).ceil() as usize;
    Ok((0..n).map(|i| i as f64 * step).filter(|&w| w < 1.0).collect())
}

/// The full two-sided scan grid: the cartesian square of
/// [`scan_grid`].
pub fn scan_grid_two_sided(step: f64) -> Result<Vec<(f64, f64)>> {
    let axis = scan_grid(step)?;
    Ok(axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| (a, b)))
        .collect())
}

// ---------------------------------------------------------------------------
// Bootstrap-calibrated factorial study
// ---------------------------------------------------------------------------

/// Summary row of the bootstrap study for one treatment-effect target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRow {
    pub label: String,
    pub side: CiSide,
    /// The (re-centered) full-sample estimate the replications are judged
    /// against.
    pub truth: f64,
    pub coverage: f64,
    pub coverage_se: f64,
    pub length: f64,
    pub length_se: f64,
    pub coverage_standard: f64,
    pub coverage_standard_se: f64,
    pub length_standard: f64,
    pub length_standard_se: f64,
    /// Expected-(excess-)length ratio adaptive / standard.
    pub ratio: f64,
    pub ratio_se: f64,
}

/// Bootstrap study results: per-target coverage and expected
/// (excess) length of the adaptive and standard intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapStudy {
    pub rows: Vec<BootstrapRow>,
    meta: Meta,
}

impl BootstrapStudy {
    pub fn to_csv_string(&self) -> String {
        render_csv(
            &self.meta,
            "label,side,truth,coverage,coverage_se,length,length_se,\
             coverage_standard,coverage_standard_se,length_standard,length_standard_se,\
             ratio,ratio_se",
            self.rows.iter().map(|r| {
                let side = match r.side {
                    CiSide::Upper => "upper",
                    CiSide::Lower => "lower",
                    CiSide::TwoSided => "two_sided",
                };
                format!(
                    "{},{side},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    r.label,
                    r.truth,
                    r.coverage,
                    r.coverage_se,
                    r.length,
                    r.length_se,
                    r.coverage_standard,
                    r.coverage_standard_se,
                    r.length_standard,
                    r.length_standard_se,
                    r.ratio,
                    r.ratio_se
                )
            }),
        )
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_csv_string())
    }
}

/// One inference target within the factorial study.
struct Target {
    label: String,
    mode: FactorialMode,
    formula: Formula,
    side: CiSide,
}

/// The four standard factorial targets: upper one-sided intervals for the
/// two main effects (each using the other as its sign-restricted
/// control) and two-sided intervals for the both-arms and interaction
/// effects (using both main effects).
fn factorial_targets(outcome: &str, t1: &str, t2: &str) -> Vec<Target> {
    vec![
        Target {
            label: t1.to_string(),
            mode: FactorialMode::Interaction,
            formula: Formula {
                outcome: outcome.into(),
                interest: t1.into(),
                restricted: vec![t2.into()],
                unrestricted: vec![FACTORIAL_CONST.into(), FACTORIAL_T1T2.into()],
            },
            side: CiSide::Upper,
        },
        Target {
            label: t2.to_string(),
            mode: FactorialMode::Interaction,
            formula: Formula {
                outcome: outcome.into(),
                interest: t2.into(),
                restricted: vec![t1.into()],
                unrestricted: vec![FACTORIAL_CONST.into(), FACTORIAL_T1T2.into()],
            },
            side: CiSide::Upper,
        },
        Target {
            label: "both".to_string(),
            mode: FactorialMode::Both,
            formula: Formula {
                outcome: outcome.into(),
                interest: FACTORIAL_T1T2.into(),
                restricted: vec![FACTORIAL_T1_ONLY.into(), FACTORIAL_T2_ONLY.into()],
                unrestricted: vec![FACTORIAL_CONST.into()],
            },
            side: CiSide::TwoSided,
        },
        Target {
            label: "interaction".to_string(),
            mode: FactorialMode::Interaction,
            formula: Formula {
                outcome: outcome.into(),
                interest: FACTORIAL_T1T2.into(),
                restricted: vec![t1.into(), t2.into()],
                unrestricted: vec![FACTORIAL_CONST.into()],
            },
            side: CiSide::TwoSided,
        },
    ]
}

/// Re-centering shift for a coefficient name: main-effect shifts apply to
/// both the interaction-mode column and its both-mode alias.
fn shift_for(recenter: &[(String, f64)], t1: &str, t2: &str, name: &str) -> f64 {
    let logical = if name == FACTORIAL_T1_ONLY {
        t1
    } else if name == FACTORIAL_T2_ONLY {
        t2
    } else {
        name
    };
    recenter
        .iter()
        .find(|(n, _)| n == logical)
        .map_or(0.0, |&(_, s)| s)
}

/// Per-replication record for one target.
#[derive(Clone, Copy)]
struct RepRecord {
    cover: bool,
    cover_std: bool,
    length: f64,
    length_std: f64,
}

/// Builds the (possibly re-centered) estimate bundle for a target from a
/// fitted regression.
fn shifted_bundle(
    fit: &crate::regress::RegressionResult,
    target: &Target,
    recenter: &[(String, f64)],
    t1: &str,
    t2: &str,
) -> Result<crate::ci::EstimateBundle> {
    let bundle = fit.bundle()?;
    let b = bundle.b_hat() + shift_for(recenter, t1, t2, &target.formula.interest);
    let d: Vec<f64> = bundle
        .d_hat()
        .iter()
        .zip(&target.formula.restricted)
        .map(|(&v, name)| v + shift_for(recenter, t1, t2, name))
        .collect();
    crate::ci::EstimateBundle::new(b, d, bundle.sigma_hat().to_vec(), bundle.n())
}

/// Draws bootstrap samples from `data`, fits both factorial
/// parameterizations per sample, and summarizes coverage and expected
/// (excess) length of the adaptive (surface-method) and standard
/// intervals for the four factorial targets.
///
/// `recenter` maps a treatment column name to a shift added to its
/// estimated coefficient in every sample (and to the full-sample truth),
/// the device used to move a wrong-signed main-effect estimate back to
/// the restricted parameter space. Truth for every target is the
/// (re-centered) full-sample estimate. One-sided rows report expected
/// excess length (truth minus bound); two-sided rows report expected
/// length.
#[allow(clippy::too_many_arguments)]
pub fn bootstrap_study(
    data: &Dataset,
    outcome: &str,
    t1: &str,
    t2: &str,
    level: Level,
    reps: u64,
    seed: u64,
    recenter: &[(String, f64)],
) -> Result<BootstrapStudy> {
    if reps < 100 {
        return Err(Error::invalid(format!(
            "bootstrap needs at least 100 replications, got {reps}"
        )));
    }
    for (name, _) in recenter {
        if name != t1 && name != t2 {
            return Err(Error::invalid(format!(
                "recenter target {name:?} is not a treatment column ({t1:?}, {t2:?})"
            )));
        }
    }
    let targets = factorial_targets(outcome, t1, t2);
    let n = data.n_rows();

    // Full-sample fits define the truths.
    let mut truths = Vec::with_capacity(targets.len());
    for target in &targets {
        let design = factorial_design(data, t1, t2, target.mode)?;
        let fit = ols_fit(&design, &target.formula, HcFlavor::Hc1)?;
        let truth = fit.coefficient(&target.formula.interest)?
            + shift_for(recenter, t1, t2, &target.formula.interest);
        truths.push(truth);
    }

    let records: Vec<Vec<RepRecord>> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<RepRecord>> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[TAG_BOOTSTRAP, rep]));
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let sample = data.subset_rows(&rows)?;
            let designs = [
                factorial_design(&sample, t1, t2, FactorialMode::Interaction)?,
                factorial_design(&sample, t1, t2, FactorialMode::Both)?,
            ];
            let mut out = Vec::with_capacity(targets.len());
            for (target, &truth) in targets.iter().zip(&truths) {
                let design = match target.mode {
                    FactorialMode::Interaction => &designs[0],
                    FactorialMode::Both => &designs[1],
                };
                let fit = ols_fit(design, &target.formula, HcFlavor::Hc1)?;
                let bundle = shifted_bundle(&fit, target, recenter, t1, t2)?;
                let se = (bundle.sigma_hat()[0][0] / bundle.n() as f64).sqrt();
                let b = bundle.b_hat();
                let iv = ci_from_estimates(&bundle, level, target.side, &Method::Surface)?;
                out.push(match iv {
                    Interval::OneSided(iv) => RepRecord {
                        cover: iv.bound <= truth,
                        cover_std: b - level.z_standard_one_sided() * se <= truth,
                        length: truth - iv.bound,
                        length_std: truth - (b - level.z_standard_one_sided() * se),
                    },
                    Interval::TwoSided(iv) => {
                        let half = level.z_standard_two_sided() * se;
                        RepRecord {
                            cover: iv.lower <= truth && truth <= iv.upper,
                            cover_std: (b - half) <= truth && truth <= (b + half),
                            length: iv.length(),
                            length_std: 2.0 * half,
                        }
                    }
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let m = reps as f64;
    let rows = targets
        .iter()
        .enumerate()
        .map(|(t, target)| {
            let mut covers = 0.0;
            let mut covers_std = 0.0;
            let (mut sa, mut saa, mut sb, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for rec in records.iter().map(|r| r[t]) {
                covers += f64::from(u8::from(rec.cover));
                covers_std += f64::from(u8::from(rec.cover_std));
                sa += rec.length;
                saa += rec.length * rec.length;
                sb += rec.length_std;
                sbb += rec.length_std * rec.length_std;
                sab += rec.length * rec.length_std;
            }
            let coverage = covers / m;
            let coverage_std = covers_std / m;
            let mean_a = sa / m;
            let mean_b = sb / m;
            let var_a = (saa / m - mean_a * mean_a).max(0.0);
            let var_b = (sbb / m - mean_b * mean_b).max(0.0);
            let cov_ab = sab / m - mean_a * mean_b;
            let ratio = mean_a / mean_b;
            // Delta-method SE of the ratio of means over the same
            // replications.
            let ratio_var = (var_a - 2.0 * ratio * cov_ab + ratio * ratio * var_b)
                .max(0.0)
                / (mean_b * mean_b * m);
            BootstrapRow {
                label: target.label.clone(),
                side: target.side,
                truth: truths[t],
                coverage,
                coverage_se: (coverage * (1.0 - coverage) / m).sqrt(),
                length: mean_a,
                length_se: (var_a / m).sqrt(),
                coverage_standard: coverage_std,
                coverage_standard_se: (coverage_std * (1.0 - coverage_std) / m).sqrt(),
                length_standard: mean_b,
                length_standard_se: (var_b / m).sqrt(),
                ratio,
                ratio_se: ratio_var.sqrt(),
            }
        })
        .collect();

    let mut meta = vec![
        ("study".into(), "bootstrap".into()),
        ("alpha".into(), format!("{:?}", level.alpha())),
        ("gamma".into(), format!("{:?}", level.gamma())),
        ("seed".into(), seed.to_string()),
        ("reps".into(), reps.to_string()),
        ("n".into(), n.to_string()),
        ("method".into(), "surface".into()),
    ];
    for (name, shift) in recenter {
        meta.push((format!("recenter_{name}"), format!("{shift:?}")));
    }
    Ok(BootstrapStudy { rows, meta })
}

// ---------------------------------------------------------------------------
// Synthetic factorial data
// ---------------------------------------------------------------------------

/// Cell effects and noise for the synthetic 2x2 factorial generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticEffects {
    pub base: f64,
    pub t1: f64,
    pub t2: f64,
    pub interaction: f64,
    /// Residual standard deviation in the control cell.
    pub noise: f64,
    /// Relative extra residual spread under the first treatment
    /// (exercises the heteroskedasticity-robust covariance).
    pub heteroskedasticity: f64,
}

impl Default for SyntheticEffects {
    fn default() -> Self {
        SyntheticEffects {
            base: 0.0,
            t1: 0.08,
            t2: 0.0,
            interaction: 0.1,
            noise: 1.0,
            heteroskedasticity: 0.3,
        }
    }
}

/// Generates a synthetic 2x2 factorial dataset with columns `y`, `t1`,
/// `t2`: independent fair-coin treatment assignment and normal noise
/// whose spread grows under the first treatment. Deterministic given the
/// seed.
pub fn synthetic_factorial(n: usize, seed: u64, fx: &SyntheticEffects) -> Result<Dataset> {
    if n < 8 {
        return Err(Error::invalid("synthetic dataset needs at least 8 rows"));
    }
    if fx.noise <= 0.0 || fx.heteroskedasticity < 0.0 {
        return Err(Error::invalid(
            "noise must be positive and heteroskedasticity non-negative",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[TAG_SYNTHETIC]));
    let mut y = Vec::with_capacity(n);
    let mut t1 = Vec::with_capacity(n);
    let mut t2 = Vec::with_capacity(n);
    for _ in 0..n {
        let a = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
        let b = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
        let eps: f64 = rng.sample(StandardNormal);
        let sd = fx.noise * (1.0 + fx.heteroskedasticity * a);
        y.push(fx.base + fx.t1 * a + fx.t2 * b + fx.interaction * a * b + sd * eps);
        t1.push(a);
        t2.push(b);
    }
    Dataset::new(vec!["y".into(), "t1".into(), "t2".into()], vec![y, t1, t2])
}
