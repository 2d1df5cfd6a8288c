//! Assembly of the adaptive one- and two-sided confidence intervals.
//!
//! The normal-means constructors take standardized inputs `(y_beta,
//! y_delta, omega)` directly; [`ci_from_estimates`] standardizes a
//! finite-sample estimate bundle `(b_hat, d_hat, sigma_hat, n)` first and
//! maps the endpoints back to the scale of `b_hat`.
//!
//! Every interval here is the intersection of a standard interval at the
//! reduced level `alpha - gamma` with an adaptive arm: the adaptive side
//! tightens the bound by `w' y_delta` (which is non-negative in
//! expectation under the sign restrictions) while the `min{}` against the
//! reduced-level quantile caps how much can ever be given back. Empty
//! selections reduce every constructor to the standard interval exactly.

use serde::{Deserialize, Serialize};

use crate::critval::{
    solve_c_one_sided, solve_cu_optimal, CritMethod, CriticalValuePair, Level,
};
use crate::error::{Error, Result};
use crate::gauss::{CorrMatrix, McConfig, TildeOmega, DEFAULT_DRAWS};
use crate::select::{select_one_sided, select_two_sided, tilde_omega_of, SubsetSelection};
use crate::surface::{builtin_surface, SurfaceTarget};

/// How critical values are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Solve by Monte Carlo with this configuration.
    ExactMc(McConfig),
    /// Evaluate the built-in response surface for the level.
    Surface,
}

impl Method {
    /// The provenance tag recorded in interval outputs.
    pub fn tag(&self) -> CritMethod {
        match self {
            Method::ExactMc(_) => CritMethod::ExactMc,
            Method::Surface => CritMethod::Surface,
        }
    }

    /// Default choice: the response surface when one is built in for the
    /// level, exact Monte Carlo (at the default draw count) otherwise.
    pub fn auto(level: Level, seed: u64) -> Method {
        if builtin_surface(level, SurfaceTarget::COneSided).is_ok() {
            Method::Surface
        } else {
            Method::ExactMc(McConfig::new(DEFAULT_DRAWS, seed).expect("default draws are valid"))
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Method::ExactMc(cfg) => Some(cfg.seed()),
            Method::Surface => None,
        }
    }

    fn draws(&self) -> Option<u64> {
        match self {
            Method::ExactMc(cfg) => Some(cfg.draws()),
            Method::Surface => None,
        }
    }
}

/// Which tail a one-sided interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSide {
    /// `[bound, +inf)`: an upper one-sided interval (lower confidence
    /// bound).
    Upper,
    /// `(-inf, bound]`.
    Lower,
}

/// Requested interval kind for [`ci_from_estimates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiSide {
    Upper,
    Lower,
    TwoSided,
}

/// A one-sided interval record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalOneSided {
    pub side: BoundSide,
    /// The finite endpoint (lower endpoint for `Upper`, upper for
    /// `Lower`).
    pub bound: f64,
    pub level: Level,
    /// The selected control subset of the (possibly mirrored, see
    /// [`ci_one_sided_lower`]) problem.
    pub used_subset: SubsetSelection,
    /// The critical value `c` at the selected subset's explained
    /// correlation. The effective offset actually applied is
    /// `min{z_{1-alpha+gamma}, w' y_delta + c}`.
    pub critical: f64,
    pub method: CritMethod,
    /// Seed of the Monte Carlo solve (`None` for surface evaluation).
    pub seed: Option<u64>,
    /// Draw count of the Monte Carlo solve (`None` for surface
    /// evaluation).
    pub draws: Option<u64>,
}

/// A two-sided interval record.
///
/// Because each endpoint truncates separately, `lower > upper` is possible
/// for extreme control estimates; such intervals are reported raw with
/// `degenerate = true` and their length is defined as
/// `max(upper - lower, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalTwoSided {
    pub lower: f64,
    pub upper: f64,
    pub level: Level,
    /// Subset tightening the lower endpoint (non-negative weights).
    pub s1: SubsetSelection,
    /// Subset tightening the upper endpoint (non-positive weights).
    pub s2: SubsetSelection,
    /// Reduced correlation triple of the selected pair.
    pub tilde_omega: TildeOmega,
    /// Critical values used by the two arms.
    pub cvals: CriticalValuePair,
    /// True when the endpoints crossed (`lower > upper`).
    pub degenerate: bool,
    pub method: CritMethod,
    pub seed: Option<u64>,
    pub draws: Option<u64>,
}

impl IntervalTwoSided {
    /// Interval length, zero when the endpoints crossed.
    pub fn length(&self) -> f64 {
        (self.upper - self.lower).max(0.0)
    }
}

/// Either interval kind, as produced by [`ci_from_estimates`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interval {
    OneSided(IntervalOneSided),
    TwoSided(IntervalTwoSided),
}

fn validate_inputs(y_beta: f64, y_delta: &[f64], omega: &CorrMatrix) -> Result<()> {
    if !y_beta.is_finite() || y_delta.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("estimates must be finite"));
    }
    if y_delta.len() != omega.n_controls() {
        return Err(Error::invalid(format!(
            "y_delta has {} entries but the correlation matrix describes {} controls",
            y_delta.len(),
            omega.n_controls()
        )));
    }
    Ok(())
}

/// Inner product of selection weights with the selected control
/// estimates.
fn weighted_controls(subset: &SubsetSelection, y_delta: &[f64]) -> f64 {
    subset
        .indices
        .iter()
        .zip(&subset.weights)
        .map(|(&i, &w)| w * y_delta[i - 1])
        .sum()
}

/// One-sided critical value for a selected subset under the requested
/// method. Empty selections short-circuit to the standard quantile
/// `z_{1-alpha}` so the reduction to the standard interval is exact under
/// both methods.
fn one_sided_critical(level: Level, subset: &SubsetSelection, method: &Method) -> Result<f64> {
    if subset.is_empty() {
        return Ok(level.z_standard_one_sided());
    }
    match method {
        Method::ExactMc(cfg) => Ok(solve_c_one_sided(level, subset.objective, cfg)?.value),
        Method::Surface => {
            builtin_surface(level, SurfaceTarget::COneSided)?.eval_one(subset.objective)
        }
    }
}

/// Upper one-sided interval `[bound, +inf)` for the interest coordinate
/// of a standardized normal vector with correlation `omega`:
///
/// `bound = y_beta - min{z_{1-alpha+gamma}, w' y_delta(s*) + c(w_s*)}`
///
/// with the subset `s*` chosen by [`select_one_sided`].
pub fn ci_one_sided_normal(
    y_beta: f64,
    y_delta: &[f64],
    omega: &CorrMatrix,
    level: Level,
    method: &Method,
) -> Result<IntervalOneSided> {
    validate_inputs(y_beta, y_delta, omega)?;
    let subset = select_one_sided(omega)?;
    let critical = one_sided_critical(level, &subset, method)?;
    let offset = level
        .z_one_sided_trunc()
        .min(weighted_controls(&subset, y_delta) + critical);
    Ok(IntervalOneSided {
        side: BoundSide::Upper,
        bound: y_beta - offset,
        level,
        used_subset: subset,
        critical,
        method: method.tag(),
        seed: method.seed(),
        draws: method.draws(),
    })
}

/// Lower one-sided interval `(-inf, bound]`, obtained from
/// [`ci_one_sided_normal`] by negation duality: bounding `beta` from
/// above is bounding `-beta` from below, and negating the interest
/// coordinate flips the sign of its correlations with the controls.
///
/// The mirrored problem is solved literally and its bound negated, so the
/// duality is exact to the bit. `used_subset` indices refer to the same
/// controls as in the original problem.
pub fn ci_one_sided_lower(
    y_beta: f64,
    y_delta: &[f64],
    omega: &CorrMatrix,
    level: Level,
    method: &Method,
) -> Result<IntervalOneSided> {
    let mirrored = mirror_interest(omega)?;
    let upper = ci_one_sided_normal(-y_beta, y_delta, &mirrored, level, method)?;
    Ok(IntervalOneSided {
        side: BoundSide::Lower,
        bound: -upper.bound,
        ..upper
    })
}

/// Negates the correlations between the interest coordinate and every
/// control (the correlation matrix of `(-Y_beta, Y_delta)`).
fn mirror_interest(omega: &CorrMatrix) -> Result<CorrMatrix> {
    let dim = omega.dim();
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let sign = if (i == 0) != (j == 0) { -1.0 } else { 1.0 };
                    sign * omega.at(i, j)
                })
                .collect()
        })
        .collect();
    CorrMatrix::from_rows(&rows)
}

/// Two-sided interval for the interest coordinate:
///
/// `lower = y_beta - min{z_{1-(alpha-gamma)/2}, w1' y_delta(s1) + c_l}`
/// `upper = y_beta + min{z_{1-(alpha-gamma)/2}, -w2' y_delta(s2) + c_u}`
///
/// with subsets from [`select_two_sided`] and the critical value pair
/// solved (or read off the surface) at the selected correlation triple.
/// The width can never exceed `2 z_{1-(alpha-gamma)/2}`.
pub fn ci_two_sided_normal(
    y_beta: f64,
    y_delta: &[f64],
    omega: &CorrMatrix,
    level: Level,
    method: &Method,
) -> Result<IntervalTwoSided> {
    validate_inputs(y_beta, y_delta, omega)?;
    let (s1, s2) = select_two_sided(omega)?;
    let tw = tilde_omega_of(omega, &s1, &s2)?;
    let trunc = level.z_two_sided_trunc();

    let cvals = if tw.is_zero() {
        // Both selections empty: the standard two-sided interval, exactly.
        let z = level.z_standard_two_sided();
        CriticalValuePair {
            c_lower: z,
            c_upper: z,
            trunc,
            method: method.tag(),
        }
    } else {
        match method {
            Method::ExactMc(cfg) => solve_cu_optimal(level, &tw, cfg)?.pair,
            Method::Surface => {
                let surf = builtin_surface(level, SurfaceTarget::CUpperTwoSided)?;
                CriticalValuePair {
                    c_lower: surf.eval_two(tw.w13(), tw.w12())?,
                    c_upper: surf.eval_two(tw.w12(), tw.w13())?,
                    trunc,
                    method: CritMethod::Surface,
                }
            }
        }
    };

    let lower = y_beta - trunc.min(weighted_controls(&s1, y_delta) + cvals.c_lower);
    let upper = y_beta + trunc.min(-weighted_controls(&s2, y_delta) + cvals.c_upper);
    Ok(IntervalTwoSided {
        lower,
        upper,
        level,
        s1,
        s2,
        tilde_omega: tw,
        degenerate: lower > upper,
        cvals,
        method: method.tag(),
        seed: method.seed(),
        draws: method.draws(),
    })
}

// ---------------------------------------------------------------------------
// Finite-sample estimate bundles
// ---------------------------------------------------------------------------

/// Estimates and covariance for the finite-sample problem: the interest
/// coefficient `b_hat`, the `k` sign-restricted coefficients `d_hat`
/// (parameter space `d >= 0`), and `sigma_hat`, the `(k+1) x (k+1)`
/// covariance of the sqrt(n)-scaled estimator with the interest
/// coordinate first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateBundle {
    b_hat: f64,
    d_hat: Vec<f64>,
    sigma_hat: Vec<Vec<f64>>,
    n: u64,
}

/// Standardized form of a bundle: correlation-scale inputs for the
/// normal-means constructors plus the factor mapping standardized
/// endpoints back to the scale of `b_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub y_beta: f64,
    pub y_delta: Vec<f64>,
    pub omega: CorrMatrix,
    /// `sqrt(sigma_bb / n)`: the standard error of `b_hat`.
    pub scale: f64,
}

impl EstimateBundle {
    /// Validates shapes, finiteness, positive diagonal, and symmetry
    /// (up to round-off; the stored matrix is symmetrized). Positive
    /// definiteness is checked when the correlation matrix is formed.
    pub fn new(b_hat: f64, d_hat: Vec<f64>, sigma_hat: Vec<Vec<f64>>, n: u64) -> Result<Self> {
        let dim = d_hat.len() + 1;
        if n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        if !b_hat.is_finite() || d_hat.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("estimates must be finite"));
        }
        if sigma_hat.len() != dim || sigma_hat.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid(format!(
                "covariance must be {dim} x {dim} for {} restricted coefficients",
                d_hat.len()
            )));
        }
        if sigma_hat
            .iter()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("covariance entries must be finite"));
        }
        let mut sym = sigma_hat;
        for i in 0..dim {
            if sym[i][i] <= 0.0 {
                return Err(Error::invalid(format!(
                    "covariance diagonal entry {i} must be positive, got {}",
                    sym[i][i]
                )));
            }
            for j in 0..i {
                let (a, b) = (sym[i][j], sym[j][i]);
                let tol = 1e-8 * a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > tol {
                    return Err(Error::invalid(format!(
                        "covariance is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                let avg = 0.5 * (a + b);
                sym[i][j] = avg;
                sym[j][i] = avg;
            }
        }
        Ok(EstimateBundle {
            b_hat,
            d_hat,
            sigma_hat: sym,
            n,
        })
    }

    pub fn b_hat(&self) -> f64 {
        self.b_hat
    }

    pub fn d_hat(&self) -> &[f64] {
        &self.d_hat
    }

    pub fn sigma_hat(&self) -> &[Vec<f64>] {
        &self.sigma_hat
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of sign-restricted coefficients.
    pub fn k(&self) -> usize {
        self.d_hat.len()
    }

    /// Standardizes to correlation scale: `y_beta = sqrt(n) b_hat /
    /// sqrt(sigma_bb)`, each `y_delta_i = sqrt(n) d_hat_i /
    /// sqrt(sigma_ii)`, and the correlation matrix of `sigma_hat`.
    /// Errors if the covariance is not positive definite.
    pub fn standardized(&self) -> Result<Standardized> {
        let dim = self.k() + 1;
        let sd: Vec<f64> = (0..dim).map(|i| self.sigma_hat[i][i].sqrt()).collect();
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| self.sigma_hat[i][j] / (sd[i] * sd[j]))
                    .collect()
            })
            .collect();
        let omega = CorrMatrix::from_rows(&rows)?;
        let root_n = (self.n as f64).sqrt();
        Ok(Standardized {
            y_beta: root_n * self.b_hat / sd[0],
            y_delta: self
                .d_hat
                .iter()
                .zip(&sd[1..])
                .map(|(&d, &s)| root_n * d / s)
                .collect(),
            omega,
            scale: sd[0] / root_n,
        })
    }
}

/// Builds the requested interval for `b` from a finite-sample bundle:
/// standardizes, applies the normal-means construction, and maps the
/// endpoints back by the standard error of `b_hat`. Raw (possibly
/// negative) restricted estimates are used as-is.
pub fn ci_from_estimates(
    bundle: &EstimateBundle,
    level: Level,
    side: CiSide,
    method: &Method,
) -> Result<Interval> {
    let std = bundle.standardized()?;
    match side {
        CiSide::Upper => {
            let mut iv = ci_one_sided_normal(std.y_beta, &std.y_delta, &std.omega, level, method)?;
            iv.bound *= std.scale;
            Ok(Interval::OneSided(iv))
        }
        CiSide::Lower => {
            let mut iv = ci_one_sided_lower(std.y_beta, &std.y_delta, &std.omega, level, method)?;
            iv.bound *= std.scale;
            Ok(Interval::OneSided(iv))
        }
        CiSide::TwoSided => {
            let mut iv = ci_two_sided_normal(std.y_beta, &std.y_delta, &std.omega, level, method)?;
            iv.lower *= std.scale;
            iv.upper *= std.scale;
            Ok(Interval::TwoSided(iv))
        }
    }
}
