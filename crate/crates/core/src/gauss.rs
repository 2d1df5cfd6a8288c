//! Gaussian primitives underlying every solver in this crate.
//!
//! The adaptive intervals are driven by two reduced-form Gaussian laws:
//!
//! * one-sided: `(Z1, Z2t) ~ N(0, [[1, w], [w, w]])` for a single
//!   correlation-like parameter `w in [0, 1)`;
//! * two-sided: `(Z1, Z2t, Z3t) ~ N(0, [[1, w12, w13], [w12, w12, w23],
//!   [w13, w23, w13]])` for a triple `(w12, w13, w23)`.
//!
//! `Z2t`/`Z3t` are the projections of the interest estimate onto the two
//! selected control blocks, which is why their variances coincide with
//! their covariances with `Z1`. The triple is feasible exactly when the
//! 3x3 matrix above is a genuine covariance matrix; [`in_s_bar`] tests
//! this, including the boundary branches where one of the projections is
//! degenerate at zero.
//!
//! Sampling is reproducible by construction: draws are generated in
//! fixed-size batches, each batch from its own counter-derived ChaCha
//! stream, so the stream is bit-identical regardless of how many worker
//! threads participate.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper cap on the correlation parameters `w`, `w12`, `w13`; values above
/// are clipped here before surface evaluation or solving (the reduced forms
/// degenerate as the parameter approaches 1).
pub const W_CLIP: f64 = 0.999;

// ---------------------------------------------------------------------------
// Standard-normal CDF / quantile
// ---------------------------------------------------------------------------

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF via the complementary error function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal upper-tail probability `P(Z > x)`.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Complementary error function by rational Chebyshev approximation
/// (Cody 1969), correct to a few ulps over the full double range — the
/// critical-value contracts need the CDF good to better than `1e-12`
/// absolute, which general-purpose crates do not all guarantee.
fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    const C: [f64; 9] = [
        5.64188496988670089e-1,
        8.88314979438837594e0,
        6.61191906371416295e1,
        2.98635138197400131e2,
        8.81952221241769090e2,
        1.71204761263407058e3,
        2.05107837782607147e3,
        1.23033935479799725e3,
        2.15311535474403846e-8,
    ];
    const D: [f64; 8] = [
        1.57449261107098347e1,
        1.17693950891312499e2,
        5.37181101862009858e2,
        1.62138957456669019e3,
        3.29079923573345963e3,
        4.36261909014324716e3,
        3.43936767414372164e3,
        1.23033935480374942e3,
    ];
    const P: [f64; 6] = [
        3.05326634961232344e-1,
        3.60344899949804439e-1,
        1.25781726111229246e-1,
        1.60837851487422766e-2,
        6.58749161529837803e-4,
        1.63153871373020978e-2,
    ];
    const Q: [f64; 5] = [
        2.56852019228982242e0,
        1.87295284992346047e0,
        5.27905102951428412e-1,
        6.05183413124413191e-2,
        2.33520497626869185e-3,
    ];
    const INV_SQRT_PI: f64 = 5.641_895_835_477_562_9e-1;
    const THRESHOLD: f64 = 0.46875;
    // Beyond this the result underflows to zero.
    const X_BIG: f64 = 26.543;

    let y = x.abs();
    if y <= THRESHOLD {
        // erfc via erf on the central interval.
        let z = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + A[i]) * z;
            den = (den + B[i]) * z;
        }
        return 1.0 - x * (num + A[3]) / (den + B[3]);
    }

    let result = if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        let r = (num + C[7]) / (den + D[7]);
        scaled_by_exp_neg_sq(r, y)
    } else if y < X_BIG {
        let ysq = 1.0 / (y * y);
        let mut num = P[5] * ysq;
        let mut den = ysq;
        for i in 0..4 {
            num = (num + P[i]) * ysq;
            den = (den + Q[i]) * ysq;
        }
        let r = ysq * (num + P[4]) / (den + Q[4]);
        scaled_by_exp_neg_sq((INV_SQRT_PI - r) / y, y)
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Multiplies by `exp(-y^2)` split into an exact-square part and a small
/// remainder, preserving relative accuracy deep in the tail.
fn scaled_by_exp_neg_sq(r: f64, y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

/// Standard normal quantile.
///
/// A rational-function initial guess is polished with two Halley steps
/// against [`std_normal_cdf`], which brings the round-trip error
/// `|cdf(quantile(p)) - p|` below `1e-12` over `p in [1e-12, 1 - 1e-12]`.
///
/// Errors if `p` is not strictly inside `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!(
            "quantile probability must lie strictly in (0, 1), got {p}"
        )));
    }
    let mut x = acklam_guess(p);
    // Two Halley iterations; each roughly triples the number of correct
    // digits, so the initial 1e-9 guess lands at full double precision.
    for _ in 0..2 {
        let err = std_normal_cdf(x) - p;
        let u = err / std_normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// Rational-function approximation to the normal quantile (absolute error
/// below 1.15e-9 over the full open unit interval).
fn acklam_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a base seed and a list of context words (task
/// tags, grid coordinates as bit patterns, batch indices). The derivation
/// is a fixed SplitMix64 absorption chain, so derived streams are stable
/// across threads, platforms, and releases.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut state = splitmix64(base);
    for &w in words {
        state = splitmix64(state ^ w);
    }
    state
}

/// ChaCha stream for one batch of one task, derived from the task seed.
fn batch_rng(task_seed: u64, batch_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(task_seed);
    rng.set_stream(batch_index.wrapping_add(1));
    rng
}

// ---------------------------------------------------------------------------
// Monte Carlo configuration
// ---------------------------------------------------------------------------

/// Number of draws, base seed, and batch size for a Monte Carlo task.
///
/// Invariants enforced at construction: `draws >= 10_000` and `batch`
/// divides `draws`, so a draw stream is an exact sequence of equally sized
/// batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    draws: u64,
    seed: u64,
    batch: u64,
}

/// Minimum number of draws accepted by [`McConfig`].
pub const MIN_DRAWS: u64 = 10_000;

/// Default number of draws for critical-value solving.
pub const DEFAULT_DRAWS: u64 = 2_000_000;

impl McConfig {
    /// Builds a configuration with an automatically chosen batch size (the
    /// largest divisor of `draws` not exceeding 65 536).
    pub fn new(draws: u64, seed: u64) -> Result<Self> {
        let batch = largest_divisor_at_most(draws, 65_536);
        Self::with_batch(draws, seed, batch)
    }

    /// Builds a configuration with an explicit batch size.
    pub fn with_batch(draws: u64, seed: u64, batch: u64) -> Result<Self> {
        if draws < MIN_DRAWS {
            return Err(Error::invalid(format!(
                "draws must be at least {MIN_DRAWS}, got {draws}"
            )));
        }
        if batch == 0 || draws % batch != 0 {
            return Err(Error::invalid(format!(
                "batch size {batch} must be positive and divide draws {draws}"
            )));
        }
        Ok(McConfig { draws, seed, batch })
    }

    /// Same draw schedule, different base seed.
    pub fn reseeded(self, seed: u64) -> Self {
        McConfig { seed, ..self }
    }

    /// Same seed, different draw count (batch re-derived).
    pub fn with_draws(self, draws: u64) -> Result<Self> {
        Self::new(draws, self.seed)
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn batch(&self) -> u64 {
        self.batch
    }

    fn n_batches(&self) -> u64 {
        self.draws / self.batch
    }
}

fn largest_divisor_at_most(n: u64, cap: u64) -> u64 {
    if n <= cap {
        return n;
    }
    let mut best = 1;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            if d <= cap && d > best {
                best = d;
            }
            let q = n / d;
            if q <= cap && q > best {
                best = q;
            }
        }
        d += 1;
    }
    best
}

// ---------------------------------------------------------------------------
// Correlation matrix
// ---------------------------------------------------------------------------

/// Validated correlation matrix for `(interest, controls...)`, stored dense
/// row-major. Row/column 0 always refers to the interest estimate; rows
/// `1..=k` refer to the `k` sign-restricted controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// Symmetry / unit-diagonal tolerance for correlation matrix validation.
const CORR_TOL: f64 = 1e-10;

impl CorrMatrix {
    /// Validates and wraps a dense row-major correlation matrix of
    /// dimension `dim >= 1`: symmetric, unit diagonal, off-diagonal
    /// entries strictly inside `(-1, 1)`, and positive definite.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("correlation matrix must have dimension >= 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "correlation matrix data length {} does not match dimension {dim}",
                data.len()
            )));
        }
        for i in 0..dim {
            let d = data[i * dim + i];
            if (d - 1.0).abs() > CORR_TOL {
                return Err(Error::invalid(format!(
                    "correlation matrix diagonal entry ({i},{i}) = {d} is not 1"
                )));
            }
            for j in 0..i {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                if (a - b).abs() > CORR_TOL {
                    return Err(Error::invalid(format!(
                        "correlation matrix is not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                if !(a > -1.0 && a < 1.0) {
                    return Err(Error::invalid(format!(
                        "correlation matrix off-diagonal ({i},{j}) = {a} must lie in (-1, 1)"
                    )));
                }
            }
        }
        let m = Self { dim, data };
        let lambda_min = m.min_eigenvalue();
        if lambda_min <= 0.0 {
            return Err(Error::invalid(format!(
                "correlation matrix is not positive definite (min eigenvalue {lambda_min:.3e})"
            )));
        }
        Ok(m)
    }

    /// Builds from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::invalid("correlation matrix rows must form a square"));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Dimension (1 + number of sign-restricted controls).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of sign-restricted controls.
    pub fn n_controls(&self) -> usize {
        self.dim - 1
    }

    /// Entry accessor.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Smallest eigenvalue (symmetric eigendecomposition).
    pub fn min_eigenvalue(&self) -> f64 {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

// ---------------------------------------------------------------------------
// Feasible region for the two-sided correlation triple
// ---------------------------------------------------------------------------

/// The strict-interior polynomial of the feasible region:
/// `-w23^2 + 2 w12 w13 w23 + w12 w13 - w12^2 w13 - w12 w13^2`.
///
/// Positivity of this expression (for `w12, w13 in (0, 1)`) is equivalent
/// to positive definiteness of the implied 3x3 covariance matrix.
pub fn feasible_poly(w12: f64, w13: f64, w23: f64) -> f64 {
    -w23 * w23 + 2.0 * w12 * w13 * w23 + w12 * w13 - w12 * w12 * w13 - w12 * w13 * w13
}

/// Membership test for the closure of the feasible region actually used by
/// the two-sided construction: the strict interior plus the two degenerate
/// branches where one projection is identically zero.
pub fn in_s_bar(w12: f64, w13: f64, w23: f64) -> bool {
    let interior = w12 > 0.0
        && w12 < 1.0
        && w13 > 0.0
        && w13 < 1.0
        && feasible_poly(w12, w13, w23) > 0.0;
    let branch_z3_degenerate = w13 == 0.0 && w23 == 0.0 && (0.0..1.0).contains(&w12);
    let branch_z2_degenerate = w12 == 0.0 && w23 == 0.0 && w13 > 0.0 && w13 < 1.0;
    interior || branch_z3_degenerate || branch_z2_degenerate
}

/// Open interval of `w23` values compatible with `(w12, w13)` in the
/// interior of the feasible region:
/// `w12 w13 -/+ sqrt(w12 w13 (1 - w12)(1 - w13))`.
pub fn w23_interval(w12: f64, w13: f64) -> (f64, f64) {
    let half_width = (w12 * w13 * (1.0 - w12) * (1.0 - w13)).max(0.0).sqrt();
    let mid = w12 * w13;
    (mid - half_width, mid + half_width)
}

/// Validated correlation triple for the two-sided reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeOmega {
    w12: f64,
    w13: f64,
    w23: f64,
}

impl TildeOmega {
    /// Validates membership in the feasible region (closure).
    pub fn new(w12: f64, w13: f64, w23: f64) -> Result<Self> {
        if !(w12.is_finite() && w13.is_finite() && w23.is_finite()) {
            return Err(Error::invalid("correlation triple must be finite"));
        }
        if !in_s_bar(w12, w13, w23) {
            return Err(Error::OutsideFeasibleRegion { w12, w13, w23 });
        }
        Ok(TildeOmega { w12, w13, w23 })
    }

    /// The all-zero triple (both selections empty).
    pub fn zero() -> Self {
        TildeOmega {
            w12: 0.0,
            w13: 0.0,
            w23: 0.0,
        }
    }

    /// Repairs floating-point dust on a triple that is mathematically inside
    /// the feasible region: clamps `w12`/`w13` into `[0, 0.999]` (snapping
    /// negative round-off at zero), forces `w23 = 0` on the degenerate
    /// branches, and nudges `w23` just inside its open feasibility interval
    /// otherwise. Triples far outside the region still error.
    pub fn clipped(w12: f64, w13: f64, w23: f64) -> Result<Self> {
        const DUST: f64 = 1e-9;
        let snap = |w: f64, name: &str| -> Result<f64> {
            if w < -DUST || !w.is_finite() {
                return Err(Error::invalid(format!(
                    "projection correlation {name} = {w} is negative beyond round-off"
                )));
            }
            Ok(w.clamp(0.0, W_CLIP))
        };
        let w12 = snap(w12, "w12")?;
        let w13 = snap(w13, "w13")?;
        if w12 == 0.0 || w13 == 0.0 {
            // Degenerate branch: a zero projection forces a zero cross term.
            // Anything materially nonzero indicates an upstream logic error.
            if w23.abs() > 1e-6 {
                return Err(Error::OutsideFeasibleRegion { w12, w13, w23 });
            }
            return TildeOmega::new(w12, w13, 0.0);
        }
        let (lo, hi) = w23_interval(w12, w13);
        let margin = DUST + (hi - lo) * 1e-12;
        let w23 = if hi - lo <= 2.0 * margin {
            w12 * w13 // interval too thin to keep a strict margin: use its midpoint
        } else {
            w23.clamp(lo + margin, hi - margin)
        };
        TildeOmega::new(w12, w13, w23)
    }

    pub fn w12(&self) -> f64 {
        self.w12
    }

    pub fn w13(&self) -> f64 {
        self.w13
    }

    pub fn w23(&self) -> f64 {
        self.w23
    }

    /// True when both projections are degenerate (both selections empty).
    pub fn is_zero(&self) -> bool {
        self.w12 == 0.0 && self.w13 == 0.0
    }

    /// The mirrored triple `(w13, w12, w23)`, which describes the problem
    /// with the roles of the two arms exchanged. The feasible region is
    /// symmetric under this swap.
    pub fn swapped(&self) -> Self {
        TildeOmega {
            w12: self.w13,
            w13: self.w12,
            w23: self.w23,
        }
    }

    /// Lower-triangular factor of the implied 3x3 covariance matrix,
    /// written for the sampling order `(Z1, Z2t, Z3t)`:
    ///
    /// ```text
    /// Z1  = X1
    /// Z2t = w12 X1 + a X2,            a = sqrt(w12 (1 - w12))
    /// Z3t = w13 X1 + b X2 + c X3,     b = (w23 - w12 w13) / a
    ///                                 c = sqrt(w13 - w13^2 - b^2)
    /// ```
    ///
    /// Membership in the feasible region guarantees `c^2 >= 0` up to
    /// round-off; tiny negative values are clamped at zero.
    fn factor(&self) -> (f64, f64, f64) {
        let a = (self.w12 * (1.0 - self.w12)).max(0.0).sqrt();
        let b = if a > 0.0 {
            (self.w23 - self.w12 * self.w13) / a
        } else {
            0.0
        };
        let c2 = self.w13 - self.w13 * self.w13 - b * b;
        debug_assert!(c2 > -1e-9, "factorization failed for in-region triple");
        (a, b, c2.max(0.0).sqrt())
    }
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Materialized draws from the one-sided reduced form.
pub struct BivariateDraws {
    pub z1: Vec<f64>,
    pub z2t: Vec<f64>,
}

/// Materialized draws from the two-sided reduced form.
pub struct TrivariateDraws {
    pub z1: Vec<f64>,
    pub z2t: Vec<f64>,
    pub z3t: Vec<f64>,
}

fn validate_w(w: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::invalid(format!(
            "correlation parameter must lie in [0, 1), got {w}"
        )));
    }
    Ok(w)
}

/// Samples `cfg.draws()` pairs `(Z1, Z2t)` with `Z2t = w Z1 +
/// sqrt(w(1-w)) W`. Deterministic given `cfg`; batches are generated on
/// the rayon pool but concatenated in batch order.
pub fn sample_bivariate(w: f64, cfg: &McConfig) -> Result<BivariateDraws> {
    let w = validate_w(w)?;
    let a = (w * (1.0 - w)).sqrt();
    let batches: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.n_batches())
        .into_par_iter()
        .map(|bi| {
            let mut rng = batch_rng(cfg.seed(), bi);
            let n = cfg.batch() as usize;
            let mut z1 = Vec::with_capacity(n);
            let mut z2t = Vec::with_capacity(n);
            for _ in 0..n {
                let x1: f64 = rng.sample(StandardNormal);
                let x2: f64 = rng.sample(StandardNormal);
                z1.push(x1);
                z2t.push(w * x1 + a * x2);
            }
            (z1, z2t)
        })
        .collect();
    let n = cfg.draws() as usize;
    let mut z1 = Vec::with_capacity(n);
    let mut z2t = Vec::with_capacity(n);
    for (b1, b2) in batches {
        z1.extend_from_slice(&b1);
        z2t.extend_from_slice(&b2);
    }
    Ok(BivariateDraws { z1, z2t })
}

/// Samples `cfg.draws()` triples `(Z1, Z2t, Z3t)` via the triangular
/// factorization in [`TildeOmega::factor`]. Deterministic given `cfg`.
pub fn sample_trivariate(tw: &TildeOmega, cfg: &McConfig) -> Result<TrivariateDraws> {
    let (a, b, c) = tw.factor();
    let (w12, w13) = (tw.w12(), tw.w13());
    let batches: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..cfg.n_batches())
        .into_par_iter()
        .map(|bi| {
            let mut rng = batch_rng(cfg.seed(), bi);
            let n = cfg.batch() as usize;
            let mut z1 = Vec::with_capacity(n);
            let mut z2t = Vec::with_capacity(n);
            let mut z3t = Vec::with_capacity(n);
            for _ in 0..n {
                let x1: f64 = rng.sample(StandardNormal);
                let x2: f64 = rng.sample(StandardNormal);
                let x3: f64 = rng.sample(StandardNormal);
                z1.push(x1);
                z2t.push(w12 * x1 + a * x2);
                z3t.push(w13 * x1 + b * x2 + c * x3);
            }
            (z1, z2t, z3t)
        })
        .collect();
    let n = cfg.draws() as usize;
    let mut z1 = Vec::with_capacity(n);
    let mut z2t = Vec::with_capacity(n);
    let mut z3t = Vec::with_capacity(n);
    for (b1, b2, b3) in batches {
        z1.extend_from_slice(&b1);
        z2t.extend_from_slice(&b2);
        z3t.extend_from_slice(&b3);
    }
    Ok(TrivariateDraws { z1, z2t, z3t })
}
