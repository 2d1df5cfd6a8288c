//! Monte Carlo solvers for the adaptive critical values.
//!
//! One-sided. For `w in [0, 1)` the critical value `c(w)` is the unique
//! root of
//!
//! ```text
//! P( Z1 > min{ z_{1-a+g}, Z2t + c } ) = a,   (Z1, Z2t) ~ N(0, [[1, w], [w, w]])
//! ```
//!
//! with `c(0) = z_{1-a}` and `c(w) in [0, z_{1-g}]`. The probability is
//! strictly decreasing in `c`, so bisection on a fixed draw set is exact up
//! to the bisection tolerance and the Monte Carlo error of the draw set.
//!
//! Two-sided. For a feasible triple `tw = (w12, w13, w23)` the pair
//! `(c_lower, c_upper)` truncated at `z_t = z_{1-(a-g)/2}` solves a nested
//! problem: for a candidate upper value `c_u`, the lower value
//! `ctilde(c_u, tw)` restores exact coverage,
//!
//! ```text
//! P( -min{ z_t, -Z3t + c_u } <= Z1 <= min{ z_t, Z2t + ctilde } ) = 1 - a,
//! ```
//!
//! and `c_u` is then chosen to minimize the expected interval length
//!
//! ```text
//! E[ max{ min{z_t, Z2t + ctilde(c_u)} + min{z_t, -Z3t + c_u}, 0 } ]
//! ```
//!
//! over `c_u >= c_u_lower(tw)`, the smallest upper value for which any
//! lower value attains coverage. At the all-zero triple the optimum is the
//! standard two-sided value `z_{1-a/2}` for both arms, and the solver
//! returns that analytically. The map `(w12, w13, w23) -> c_lower` equals
//! the map `(w13, w12, w23) -> c_upper` (exchange the two arms), which
//! [`c_ell_by_symmetry`] exploits and the test suite verifies.
//!
//! Design notes shared by all solvers:
//!
//! * draws are materialized once per solve and reused across every
//!   candidate evaluated (common random numbers), so results are
//!   deterministic functions of the configuration;
//! * root solving is bisection with tolerance [`BISECTION_TOL`] and a hard
//!   iteration cap, with bracket signs asserted before iterating;
//! * solved values above `z_t + `[`SATURATION_MARGIN`] are reported as
//!   saturated (`f64::INFINITY`): at that point the truncation at `z_t`
//!   binds with probability one for any realistic draw;
//! * the nested-solver limit at a degenerate triple (`w12 = 0` or
//!   `w13 = 0`) is evaluated at a nearby interior proxy with the offending
//!   coordinate set to [`BOUNDARY_PROXY`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{
    sample_bivariate, sample_trivariate, std_normal_cdf, std_normal_quantile, McConfig,
    TildeOmega, TrivariateDraws,
};

/// Bisection stops when the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-4;

/// Hard cap on bisection iterations before reporting a solver failure.
pub const MAX_BISECTION_ITER: usize = 200;

/// Number of points in the coarse grid scanned before refining the
/// expected-length minimization.
pub const COARSE_GRID_POINTS: usize = 41;

/// Golden-section refinement tolerance for the optimal upper value.
pub const REFINE_TOL: f64 = 1e-3;

/// Critical values above `trunc + SATURATION_MARGIN` are reported as
/// saturated: the truncated arm is then determined by `trunc` alone.
pub const SATURATION_MARGIN: f64 = 6.0;

/// Interior proxy used to evaluate the nested solver at degenerate triples.
pub const BOUNDARY_PROXY: f64 = 1e-4;

// ---------------------------------------------------------------------------
// Level
// ---------------------------------------------------------------------------

/// Confidence level split `(alpha, gamma)`: total miscoverage `alpha` in
/// `(0, 0.5)` and intersection budget `gamma` in `(0, alpha)` spent on the
/// standard arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    alpha: f64,
    gamma: f64,
}

impl Level {
    /// Validates `0 < gamma < alpha < 0.5`.
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 0.5), got {alpha}"
            )));
        }
        if !(gamma > 0.0 && gamma < alpha) {
            return Err(Error::invalid(format!(
                "gamma must lie in (0, alpha) = (0, {alpha}), got {gamma}"
            )));
        }
        Ok(Level { alpha, gamma })
    }

    /// The default split `gamma = alpha / 10`.
    pub fn with_default_gamma(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha / 10.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `z_{1-alpha}`: the standard one-sided critical value.
    pub fn z_standard_one_sided(&self) -> f64 {
        std_normal_quantile(1.0 - self.alpha).expect("alpha domain checked")
    }

    /// `z_{1-alpha/2}`: the standard two-sided critical value.
    pub fn z_standard_two_sided(&self) -> f64 {
        std_normal_quantile(1.0 - 0.5 * self.alpha).expect("alpha domain checked")
    }

    /// `z_{1-alpha+gamma}`: the one-sided truncation point.
    pub fn z_one_sided_trunc(&self) -> f64 {
        std_normal_quantile(1.0 - self.alpha + self.gamma).expect("level domain checked")
    }

    /// `z_{1-(alpha-gamma)/2}`: the two-sided truncation point.
    pub fn z_two_sided_trunc(&self) -> f64 {
        std_normal_quantile(1.0 - 0.5 * (self.alpha - self.gamma)).expect("level domain checked")
    }

    /// `z_{1-gamma}`: upper end of the one-sided critical value range.
    pub fn z_gamma_cap(&self) -> f64 {
        std_normal_quantile(1.0 - self.gamma).expect("gamma domain checked")
    }

    /// Saturation threshold for two-sided critical values.
    pub fn saturation_threshold(&self) -> f64 {
        self.z_two_sided_trunc() + SATURATION_MARGIN
    }
}

// ---------------------------------------------------------------------------
// Result records
// ---------------------------------------------------------------------------

/// How a critical value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CritMethod {
    /// Solved by Monte Carlo at the requested correlation structure.
    ExactMc,
    /// Evaluated from a fitted polynomial response surface.
    Surface,
}

/// A Monte Carlo estimate together with its standard error. Analytic
/// values carry a zero standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Solved {
    pub value: f64,
    pub std_error: f64,
}

impl Solved {
    fn exact(value: f64) -> Self {
        Solved {
            value,
            std_error: 0.0,
        }
    }
}

/// Two-sided critical value pair with its truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValuePair {
    /// Lower-arm critical value (`f64::INFINITY` when saturated).
    pub c_lower: f64,
    /// Upper-arm critical value (`f64::INFINITY` when saturated).
    pub c_upper: f64,
    /// Truncation point `z_{1-(alpha-gamma)/2}` applied to both arms.
    pub trunc: f64,
    /// Provenance of the values.
    pub method: CritMethod,
}

/// Full output of the two-sided optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuSolution {
    /// The solved pair.
    pub pair: CriticalValuePair,
    /// Expected-length objective at the optimum, with Monte Carlo SE.
    pub objective: Solved,
    /// Feasibility lower bound for the upper value on the same draws.
    pub c_upper_lower_bound: f64,
}

// ---------------------------------------------------------------------------
// Bisection scaffold
// ---------------------------------------------------------------------------

/// Bisects a monotone criterion `count(x) - target` over `[lo, hi]` down to
/// [`BISECTION_TOL`].
///
/// The predicate must report whether the root lies at or below its argument
/// (for an increasing count that is `count(x) >= target`, for a decreasing
/// count `count(x) <= target`). Bracket signs are asserted by the caller;
/// this routine only narrows.
fn bisect(
    what: &str,
    mut lo: f64,
    mut hi: f64,
    mut root_at_or_below: impl FnMut(f64) -> bool,
) -> Result<f64> {
    for _ in 0..MAX_BISECTION_ITER {
        if hi - lo <= BISECTION_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if root_at_or_below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::SolverFailure {
        what: what.to_string(),
        iterations: MAX_BISECTION_ITER,
        lo,
        hi,
    })
}

/// Parallel count of draws satisfying a predicate.
fn par_count2(z1: &[f64], z2: &[f64], pred: impl Fn(f64, f64) -> bool + Sync) -> u64 {
    z1.par_chunks(65_536)
        .zip(z2.par_chunks(65_536))
        .map(|(a, b)| {
            let mut n = 0u64;
            for (&x, &y) in a.iter().zip(b) {
                if pred(x, y) {
                    n += 1;
                }
            }
            n
        })
        .sum()
}

fn par_count3(
    z1: &[f64],
    z2: &[f64],
    z3: &[f64],
    pred: impl Fn(f64, f64, f64) -> bool + Sync,
) -> u64 {
    z1.par_chunks(65_536)
        .zip(z2.par_chunks(65_536).zip(z3.par_chunks(65_536)))
        .map(|(a, (b, c))| {
            let mut n = 0u64;
            for ((&x, &y), &w) in a.iter().zip(b).zip(c) {
                if pred(x, y, w) {
                    n += 1;
                }
            }
            n
        })
        .sum()
}

/// Standard error of a Monte Carlo proportion.
fn proportion_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Translates a probability-scale standard error into the root scale via a
/// central finite-difference slope of the Monte Carlo criterion.
fn root_se(se_p: f64, slope: f64) -> f64 {
    se_p / slope.abs().max(1e-6)
}

// ---------------------------------------------------------------------------
// One-sided solver
// ---------------------------------------------------------------------------

/// Solves the one-sided critical value `c(w)` at the given level.
///
/// Returns the analytic `z_{1-alpha}` without simulation at `w = 0`. For
/// `w > 0` the root is bisected on a fixed draw set; the reported standard
/// error combines the binomial error of the exceedance probability with a
/// finite-difference slope of the criterion.
pub fn solve_c_one_sided(level: Level, w: f64, cfg: &McConfig) -> Result<Solved> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::invalid(format!(
            "one-sided correlation parameter must lie in [0, 1), got {w}"
        )));
    }
    if w == 0.0 {
        return Ok(Solved::exact(level.z_standard_one_sided()));
    }
    let t = level.z_one_sided_trunc();
    let cap = level.z_gamma_cap();
    let draws = sample_bivariate(w, cfg)?;
    let n = cfg.draws();
    let target = level.alpha() * n as f64;

    let exceed_count =
        |c: f64| par_count2(&draws.z1, &draws.z2t, |z1, z2t| z1 > t.min(z2t + c)) as f64;

    let f_lo = exceed_count(0.0);
    let f_hi = exceed_count(cap);
    if !(f_lo > target && f_hi < target) {
        return Err(Error::NotBracketed {
            what: "one-sided critical value".to_string(),
            lo: 0.0,
            hi: cap,
            flo: f_lo / n as f64 - level.alpha(),
            fhi: f_hi / n as f64 - level.alpha(),
        });
    }
    // Exceedance probability decreases in c.
    let c = bisect("one-sided critical value", 0.0, cap, |c| {
        exceed_count(c) <= target
    })?;

    let p_hat = exceed_count(c) / n as f64;
    let h = 0.02_f64.min(0.5 * (cap - c).max(BISECTION_TOL)).min(0.5 * c.max(BISECTION_TOL));
    let slope = (exceed_count(c + h) - exceed_count(c - h)) / (2.0 * h * n as f64);
    Ok(Solved {
        value: c,
        std_error: root_se(proportion_se(p_hat, n), slope),
    })
}

/// Monte Carlo estimate of the one-sided coverage-defining probability
/// `P( Z1 <= min{ z_{1-a+g}, shift + Z2t + c } )` at a `delta`-type shift
/// (zero at the restriction boundary).
pub fn coverage_one_sided(
    level: Level,
    w: f64,
    c: f64,
    delta_shift: f64,
    cfg: &McConfig,
) -> Result<Solved> {
    if delta_shift < 0.0 {
        return Err(Error::invalid(format!(
            "delta shift must be non-negative, got {delta_shift}"
        )));
    }
    let t = level.z_one_sided_trunc();
    let draws = sample_bivariate(w, cfg)?;
    let n = cfg.draws();
    let count = par_count2(&draws.z1, &draws.z2t, |z1, z2t| {
        z1 <= t.min(delta_shift + z2t + c)
    });
    let p = count as f64 / n as f64;
    Ok(Solved {
        value: p,
        std_error: proportion_se(p, n),
    })
}

// ---------------------------------------------------------------------------
// Two-sided solvers
// ---------------------------------------------------------------------------

/// Feasibility lower bound for the upper critical value: the root of
/// `P( -min{z_t, -Z3t + c} <= Z1 <= z_t ) = 1 - alpha` in `c`.
///
/// At `w13 = 0` the third component is degenerate and the bound has the
/// closed form `-quantile( cdf(z_t) - (1 - alpha) )`, returned without
/// simulation.
pub fn solve_cu_lower_bound(level: Level, tw: &TildeOmega, cfg: &McConfig) -> Result<Solved> {
    if tw.w13() == 0.0 {
        let z_t = level.z_two_sided_trunc();
        let c = -std_normal_quantile(std_normal_cdf(z_t) - (1.0 - level.alpha()))?;
        return Ok(Solved::exact(c));
    }
    let draws = sample_trivariate(tw, cfg)?;
    let (c, se) = cu_lower_bound_on(level, &draws, true)?;
    Ok(Solved {
        value: c,
        std_error: se,
    })
}

/// Same criterion on a caller-provided draw set (common random numbers).
fn cu_lower_bound_on(
    level: Level,
    draws: &TrivariateDraws,
    with_se: bool,
) -> Result<(f64, f64)> {
    let z_t = level.z_two_sided_trunc();
    let n = draws.z1.len() as u64;
    let target = (1.0 - level.alpha()) * n as f64;
    // The event is { -z_t <= Z1 <= z_t } and { Z3t - Z1 <= c }: increasing in c.
    let count = |c: f64| {
        par_count3(&draws.z1, &draws.z2t, &draws.z3t, |z1, _, z3t| {
            z1 >= -z_t && z1 <= z_t && z3t - z1 <= c
        }) as f64
    };
    let lo = -level.saturation_threshold();
    let hi = level.saturation_threshold();
    let f_lo = count(lo);
    let f_hi = count(hi);
    if !(f_lo < target && f_hi > target) {
        return Err(Error::NotBracketed {
            what: "upper-value feasibility bound".to_string(),
            lo,
            hi,
            flo: f_lo / n as f64 - (1.0 - level.alpha()),
            fhi: f_hi / n as f64 - (1.0 - level.alpha()),
        });
    }
    let c = bisect("upper-value feasibility bound", lo, hi, |c| {
        count(c) >= target
    })?;
    if !with_se {
        return Ok((c, 0.0));
    }
    let p_hat = count(c) / n as f64;
    let h = 0.02;
    let slope = (count(c + h) - count(c - h)) / (2.0 * h * n as f64);
    Ok((c, root_se(proportion_se(p_hat, n), slope)))
}

/// Moves a degenerate triple to the interior proxy used for the nested
/// solver: any zero projection coordinate becomes [`BOUNDARY_PROXY`].
fn interior_proxy(tw: &TildeOmega) -> Result<TildeOmega> {
    if tw.w12() > 0.0 && tw.w13() > 0.0 {
        return Ok(*tw);
    }
    let w12 = if tw.w12() == 0.0 {
        BOUNDARY_PROXY
    } else {
        tw.w12()
    };
    let w13 = if tw.w13() == 0.0 {
        BOUNDARY_PROXY
    } else {
        tw.w13()
    };
    // Degenerate branches carry w23 = 0, which stays feasible at the proxy.
    TildeOmega::new(w12, w13, tw.w23())
}

/// Solves the lower-arm value `ctilde(c_u, tw)` restoring two-sided
/// coverage for a given upper value, on a fresh draw set.
///
/// `c_u` may be `f64::INFINITY` (saturated upper arm). Degenerate triples
/// are evaluated at the interior proxy. Returns `f64::INFINITY` when the
/// root exceeds the saturation threshold, and an infeasibility error
/// naming the bound when `c_u` is below it.
pub fn solve_c_tilde(level: Level, c_u: f64, tw: &TildeOmega, cfg: &McConfig) -> Result<Solved> {
    let tw_eff = interior_proxy(tw)?;
    let draws = sample_trivariate(&tw_eff, cfg)?;
    let (c, se) = c_tilde_on(level, c_u, &draws, true)?;
    Ok(Solved {
        value: c,
        std_error: se,
    })
}

/// Nested lower-arm solve on a caller-provided draw set.
fn c_tilde_on(
    level: Level,
    c_u: f64,
    draws: &TrivariateDraws,
    with_se: bool,
) -> Result<(f64, f64)> {
    let z_t = level.z_two_sided_trunc();
    let n = draws.z1.len() as u64;
    let target = (1.0 - level.alpha()) * n as f64;
    let sat = level.saturation_threshold();

    // Event: max(-z_t, Z3t - c_u) <= Z1 <= min(z_t, Z2t + ct), increasing in ct.
    let count = |ct: f64| {
        par_count3(&draws.z1, &draws.z2t, &draws.z3t, |z1, z2t, z3t| {
            z1 >= (-z_t).max(z3t - c_u) && z1 <= z_t.min(z2t + ct)
        }) as f64
    };

    // Feasibility: even a saturated lower arm must reach the target.
    let f_sat = count(f64::INFINITY);
    if f_sat < target {
        let (bound, _) = cu_lower_bound_on(level, draws, false)?;
        return Err(Error::InfeasibleUpperValue {
            c_upper: c_u,
            lower_bound: bound,
        });
    }
    if count(sat) < target {
        // Root beyond the saturation threshold: report as saturated.
        return Ok((f64::INFINITY, 0.0));
    }
    let lo = -sat;
    let f_lo = count(lo);
    if f_lo > target {
        return Err(Error::NotBracketed {
            what: "lower-arm critical value".to_string(),
            lo,
            hi: sat,
            flo: f_lo / n as f64 - (1.0 - level.alpha()),
            fhi: count(sat) / n as f64 - (1.0 - level.alpha()),
        });
    }
    let c = bisect("lower-arm critical value", lo, sat, |ct| {
        count(ct) >= target
    })?;
    if !with_se {
        return Ok((c, 0.0));
    }
    let p_hat = count(c) / n as f64;
    let h = 0.02;
    let slope = (count(c + h) - count(c - h)) / (2.0 * h * n as f64);
    Ok((c, root_se(proportion_se(p_hat, n), slope)))
}

/// Expected truncated length `E[max{min(z_t, Z2t + c_l) + min(z_t, -Z3t + c_u), 0}]`
/// on a draw set, with its Monte Carlo standard error.
fn expected_length_on(level: Level, c_l: f64, c_u: f64, draws: &TrivariateDraws) -> Solved {
    let z_t = level.z_two_sided_trunc();
    let n = draws.z1.len() as f64;
    let (sum, sumsq) = draws
        .z2t
        .par_chunks(65_536)
        .zip(draws.z3t.par_chunks(65_536))
        .map(|(b2, b3)| {
            let mut s = 0.0;
            let mut s2 = 0.0;
            for (&z2t, &z3t) in b2.iter().zip(b3) {
                let len = (z_t.min(z2t + c_l) + z_t.min(-z3t + c_u)).max(0.0);
                s += len;
                s2 += len * len;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    Solved {
        value: mean,
        std_error: (var / n).sqrt(),
    }
}

/// Public expected-length evaluator at explicit critical values, used by
/// the length studies and the dominance tests.
pub fn expected_length_two_sided(
    level: Level,
    tw: &TildeOmega,
    c_lower: f64,
    c_upper: f64,
    cfg: &McConfig,
) -> Result<Solved> {
    let draws = sample_trivariate(tw, cfg)?;
    Ok(expected_length_on(level, c_lower, c_upper, &draws))
}

/// Monte Carlo estimate of two-sided coverage at the restriction boundary
/// for explicit critical values:
/// `P( -min{z_t, -Z3t + c_u} <= Z1 <= min{z_t, Z2t + c_l} )`.
pub fn coverage_two_sided(
    level: Level,
    tw: &TildeOmega,
    c_lower: f64,
    c_upper: f64,
    cfg: &McConfig,
) -> Result<Solved> {
    let z_t = level.z_two_sided_trunc();
    let draws = sample_trivariate(tw, cfg)?;
    let n = cfg.draws();
    let count = par_count3(&draws.z1, &draws.z2t, &draws.z3t, |z1, z2t, z3t| {
        z1 >= (-z_t).max(z3t - c_upper) && z1 <= z_t.min(z2t + c_lower)
    });
    let p = count as f64 / n as f64;
    Ok(Solved {
        value: p,
        std_error: proportion_se(p, n),
    })
}

/// Solves the expected-length-optimal two-sided pair at a feasible triple.
///
/// At the all-zero triple the solution is the standard two-sided value on
/// both arms, returned analytically. Otherwise the upper value is searched
/// over `[c_u_lower_bound, z_t + SATURATION_MARGIN]` by a coarse grid of
/// [`COARSE_GRID_POINTS`] points followed by golden-section refinement to
/// [`REFINE_TOL`], always on one fixed draw set (common random numbers).
/// Flat stretches of the objective resolve to their smallest upper value.
pub fn solve_cu_optimal(level: Level, tw: &TildeOmega, cfg: &McConfig) -> Result<CuSolution> {
    let z_t = level.z_two_sided_trunc();
    if tw.is_zero() {
        let c = level.z_standard_two_sided();
        return Ok(CuSolution {
            pair: CriticalValuePair {
                c_lower: c,
                c_upper: c,
                trunc: z_t,
                method: CritMethod::ExactMc,
            },
            objective: Solved::exact(2.0 * c.min(z_t)),
            c_upper_lower_bound: -std_normal_quantile(
                std_normal_cdf(z_t) - (1.0 - level.alpha()),
            )?,
        });
    }

    let tw_eff = interior_proxy(tw)?;
    let draws = sample_trivariate(&tw_eff, cfg)?;
    let (clb, _) = cu_lower_bound_on(level, &draws, false)?;
    let hi = level.saturation_threshold();
    if clb >= hi {
        return Err(Error::SolverFailure {
            what: "two-sided optimization: empty search interval".to_string(),
            iterations: 0,
            lo: clb,
            hi,
        });
    }

    // Candidates within bisection tolerance of the lower bound can land a
    // draw short of feasibility on this draw set; score them as infinitely
    // long instead of failing, so they simply lose the comparison.
    let objective = |c_u: f64| -> Result<f64> {
        match c_tilde_on(level, c_u, &draws, false) {
            Ok((c_l, _)) => Ok(expected_length_on(level, c_l, c_u, &draws).value),
            Err(Error::InfeasibleUpperValue { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };

    // Coarse scan. Ties keep the smallest candidate.
    let mut best_i = 0usize;
    let mut best_val = f64::INFINITY;
    let mut grid = Vec::with_capacity(COARSE_GRID_POINTS);
    let step = (hi - clb) / (COARSE_GRID_POINTS - 1) as f64;
    for i in 0..COARSE_GRID_POINTS {
        let c_u = clb + step * i as f64;
        let val = objective(c_u)?;
        if val < best_val {
            best_val = val;
            best_i = i;
        }
        grid.push((c_u, val));
    }
    if !best_val.is_finite() {
        return Err(Error::SolverFailure {
            what: "two-sided optimization: no feasible upper value on the grid".to_string(),
            iterations: COARSE_GRID_POINTS,
            lo: clb,
            hi,
        });
    }

    // Golden-section refinement on the bracketing interval.
    let mut a = grid[best_i.saturating_sub(1)].0;
    let mut b = grid[(best_i + 1).min(COARSE_GRID_POINTS - 1)].0;
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > REFINE_TOL {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2)?;
        }
    }
    let mut c_u = 0.5 * (a + b);
    let mut val_at_cu = objective(c_u)?;

    // A saturated stretch makes the objective exactly flat in c_u; walk the
    // flat set to its left edge so the reported minimizer is the smallest.
    let mut lo_edge = grid[best_i.saturating_sub(1)].0;
    if objective(lo_edge)? > val_at_cu + 1e-9 {
        while c_u - lo_edge > REFINE_TOL {
            let mid = 0.5 * (lo_edge + c_u);
            let v = objective(mid)?;
            if v <= val_at_cu + 1e-9 {
                c_u = mid;
                val_at_cu = val_at_cu.min(v);
            } else {
                lo_edge = mid;
            }
        }
    } else {
        // The whole bracket is flat; its left end is the smallest minimizer.
        c_u = lo_edge;
        val_at_cu = objective(c_u)?;
    }

    let (c_l, _) = c_tilde_on(level, c_u, &draws, false)?;
    let objective_est = expected_length_on(level, c_l, c_u, &draws);
    debug_assert!((objective_est.value - val_at_cu).abs() < 1e-9);
    Ok(CuSolution {
        pair: CriticalValuePair {
            c_lower: c_l,
            c_upper: if c_u > hi { f64::INFINITY } else { c_u },
            trunc: z_t,
            method: CritMethod::ExactMc,
        },
        objective: objective_est,
        c_upper_lower_bound: clb,
    })
}

/// The lower-arm value obtained through the arm-exchange symmetry: the
/// lower value at `(w12, w13, w23)` equals the upper value at
/// `(w13, w12, w23)`.
pub fn c_ell_by_symmetry(level: Level, tw: &TildeOmega, cfg: &McConfig) -> Result<f64> {
    Ok(solve_cu_optimal(level, &tw.swapped(), cfg)?.pair.c_upper)
}
