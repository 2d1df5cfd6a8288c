//! Polynomial response surfaces for the critical values.
//!
//! Solving a critical value by Monte Carlo costs seconds; evaluating a
//! fitted polynomial costs nanoseconds. This module ships pre-fitted
//! 6th-order response surfaces for the default `gamma = alpha/10` at
//! `alpha in {0.01, 0.05, 0.1}` and can fit fresh surfaces from solver
//! output on the default (or any) grid.
//!
//! * One-sided surfaces are univariate in `w` (7 coefficients).
//! * Two-sided surfaces give the upper value as a bivariate polynomial in
//!   `(w12, w13)` of total degree 6 (28 coefficients); the `w23`
//!   coordinate is deliberately dropped because the solved values are
//!   nearly invariant in it. The lower value is the same surface with
//!   `(w12, w13)` exchanged (arm symmetry), so no second table is needed.
//!
//! Evaluation clamps at zero from below: fitted polynomials can dip
//! negative just past the edge of the fitting grid while the true critical
//! values are non-negative.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::critval::Level;
use crate::error::{Error, Result};
use crate::gauss::in_s_bar;

/// Which critical value a surface approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceTarget {
    /// One-sided critical value `c(w)`.
    COneSided,
    /// Two-sided upper value `c_u(w12, w13)`; the lower value is the same
    /// surface evaluated with the coordinates exchanged.
    CUpperTwoSided,
}

impl SurfaceTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceTarget::COneSided => "c_one_sided",
            SurfaceTarget::CUpperTwoSided => "c_upper_two_sided",
        }
    }

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c_one_sided" => Ok(SurfaceTarget::COneSided),
            "c_upper_two_sided" => Ok(SurfaceTarget::CUpperTwoSided),
            other => Err(Error::Parse(format!("unknown surface target {other:?}"))),
        }
    }
}

/// Maximum total degree of a surface polynomial.
pub const MAX_DEGREE: u32 = 6;

/// A polynomial response surface: coefficients keyed by exponent tuples.
///
/// A univariate surface has keys `(e, 0)` where `e` is the exponent of
/// `w`, exactly 7 of them. A bivariate surface has keys `(i, j)` where the
/// coefficient multiplies `w13^i * w12^j` (row-by-column, the layout the
/// built-in tables use), with `i + j <= 6` — exactly 28 coefficients, some of
/// which may be zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySurface {
    level: Level,
    target: SurfaceTarget,
    arity: u8,
    #[serde(with = "coeff_entries")]
    coeffs: BTreeMap<(u32, u32), f64>,
}

/// Serializes the coefficient map as a list of `[e1, e2, value]` entries
/// so the JSON form does not need non-string map keys.
mod coeff_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(u32, u32), f64>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let entries: Vec<(u32, u32, f64)> =
            map.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        entries.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<(u32, u32), f64>, D::Error> {
        let entries = Vec::<(u32, u32, f64)>::deserialize(de)?;
        Ok(entries.into_iter().map(|(a, b, c)| ((a, b), c)).collect())
    }
}

impl PolySurface {
    /// Builds a surface after validating the coefficient layout.
    pub fn new(
        level: Level,
        target: SurfaceTarget,
        arity: u8,
        coeffs: BTreeMap<(u32, u32), f64>,
    ) -> Result<Self> {
        match arity {
            1 => {
                if coeffs.len() != 7 || coeffs.keys().any(|&(i, j)| j != 0 || i > MAX_DEGREE) {
                    return Err(Error::invalid(
                        "univariate surface requires exactly the 7 coefficients (0..=6, 0)",
                    ));
                }
            }
            2 => {
                let complete = (0..=MAX_DEGREE)
                    .flat_map(|i| (0..=MAX_DEGREE - i).map(move |j| (i, j)))
                    .all(|k| coeffs.contains_key(&k));
                if coeffs.len() != 28 || !complete {
                    return Err(Error::invalid(
                        "bivariate surface requires exactly the 28 total-degree-6 coefficients",
                    ));
                }
            }
            a => return Err(Error::invalid(format!("surface arity must be 1 or 2, got {a}"))),
        }
        Ok(PolySurface {
            level,
            target,
            arity,
            coeffs,
        })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn target(&self) -> SurfaceTarget {
        self.target
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    /// Coefficient accessor (zero for absent keys).
    pub fn coeff(&self, e1: u32, e2: u32) -> f64 {
        self.coeffs.get(&(e1, e2)).copied().unwrap_or(0.0)
    }

    /// Coefficients sorted by exponent tuple.
    pub fn coeffs(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    /// Evaluates a univariate surface by Horner's scheme, clamped at zero.
    pub fn eval_one(&self, w: f64) -> Result<f64> {
        if self.arity != 1 {
            return Err(Error::invalid("eval_one called on a bivariate surface"));
        }
        check_coord(w, "w")?;
        let mut acc = 0.0;
        for i in (0..=MAX_DEGREE).rev() {
            acc = acc * w + self.coeff(i, 0);
        }
        Ok(acc.max(0.0))
    }

    /// Evaluates a bivariate surface at `(w12, w13)` (any `w23` is
    /// irrelevant by construction), clamped at zero. Horner in `w13` with
    /// inner Horner polynomials in `w12`.
    pub fn eval_two(&self, w12: f64, w13: f64) -> Result<f64> {
        if self.arity != 2 {
            return Err(Error::invalid("eval_two called on a univariate surface"));
        }
        check_coord(w12, "w12")?;
        check_coord(w13, "w13")?;
        let mut acc = 0.0;
        for i in (0..=MAX_DEGREE).rev() {
            let mut row = 0.0;
            for j in (0..=MAX_DEGREE - i).rev() {
                row = row * w12 + self.coeff(i, j);
            }
            acc = acc * w13 + row;
        }
        Ok(acc.max(0.0))
    }
}

fn check_coord(w: f64, name: &str) -> Result<()> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::invalid(format!(
            "surface coordinate {name} must lie in [0, 1), got {w}"
        )));
    }
    Ok(())
}

/// Evaluates a surface at a coordinate slice: one coordinate for
/// univariate surfaces; two or three (the third ignored) for bivariate.
pub fn eval_surface(surface: &PolySurface, coords: &[f64]) -> Result<f64> {
    match (surface.arity(), coords) {
        (1, [w]) => surface.eval_one(*w),
        (2, [w12, w13]) | (2, [w12, w13, _]) => surface.eval_two(*w12, *w13),
        _ => Err(Error::invalid(format!(
            "surface of arity {} cannot be evaluated at {} coordinates",
            surface.arity(),
            coords.len()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Built-in surfaces
// ---------------------------------------------------------------------------

/// One-sided coefficient rows for `gamma = alpha/10`, exponents 0..=6.
const ONE_SIDED_TABLES: [(f64, [f64; 7]); 3] = [
    (
        0.01,
        [2.3241, 2.5073, -19.6229, 65.0489, -122.0242, 112.9814, -40.9895],
    ),
    (
        0.05,
        [1.6385, 2.4813, -16.1007, 52.6998, -98.9348, 91.7646, -33.3628],
    ),
    (
        0.1,
        [1.2726, 2.4250, -14.1041, 46.0326, -86.7946, 80.8189, -29.4840],
    ),
];

/// Two-sided upper-value coefficients for `gamma = alpha/10`. Row index is
/// the `w13` exponent, position within a row is the `w12` exponent.
const TWO_SIDED_TABLES: [(f64, [&[f64]; 7]); 3] = [
    (
        0.01,
        [
            &[2.5710, 1.4378, -4.7977, 12.2591, -20.5823, 18.2815, -6.5866],
            &[1.1854, -1.1672, 3.6035, -2.5234, 0.2467, 0.6751],
            &[-16.4621, -2.1843, -2.6765, 0.8411, -0.6847],
            &[63.1856, 8.4153, 1.0849, 0.7850],
            &[-128.0372, -9.2032, -0.3625],
            &[123.3096, 3.1479],
            &[-45.5050],
        ],
    ),
    (
        0.05,
        [
            &[1.9540, 1.3388, -4.5110, 11.7294, -18.8756, 15.5342, -5.2786],
            &[1.1289, -0.8006, 1.1262, -1.1742, 2.1281, -0.5511],
            &[-12.2929, 0.0090, 0.9084, -3.2329, 0.1723],
            &[45.6505, 0.5939, 0.8153, 1.7625],
            &[-92.3587, -1.0048, -0.9854],
            &[89.5045, 0.2851],
            &[-33.3683],
        ],
    ),
    (
        0.1,
        [
            &[1.6348, 1.2890, -4.8501, 14.0485, -23.9082, 20.3891, -7.0186],
            &[1.2271, 0.0224, -0.6555, 0.7875, 1.0308, -0.5813],
            &[-11.7243, -2.0585, 3.7550, -5.0051, 1.5399],
            &[43.6253, 3.2898, -1.7097, 1.1221],
            &[-87.8291, -2.6854, 0.6640],
            &[84.6893, 0.5102],
            &[-31.4176],
        ],
    ),
];

/// Matching tolerance when looking up a built-in level.
const LEVEL_MATCH_TOL: f64 = 1e-12;

/// Returns the built-in surface for the requested level and target.
///
/// Built-ins exist for `alpha in {0.01, 0.05, 0.1}` with `gamma =
/// alpha/10`; any other level yields [`Error::SurfaceUnavailable`], at
/// which point the caller can solve exactly or fit a custom surface.
pub fn builtin_surface(level: Level, target: SurfaceTarget) -> Result<PolySurface> {
    let matches =
        |a: f64| (level.alpha() - a).abs() < LEVEL_MATCH_TOL && (level.gamma() - a / 10.0).abs() < LEVEL_MATCH_TOL;
    match target {
        SurfaceTarget::COneSided => {
            for (a, row) in ONE_SIDED_TABLES {
                if matches(a) {
                    let coeffs = row
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| ((i as u32, 0), c))
                        .collect();
                    return PolySurface::new(level, target, 1, coeffs);
                }
            }
        }
        SurfaceTarget::CUpperTwoSided => {
            for (a, rows) in TWO_SIDED_TABLES {
                if matches(a) {
                    let mut coeffs = BTreeMap::new();
                    for (i, row) in rows.iter().enumerate() {
                        for (j, &c) in row.iter().enumerate() {
                            coeffs.insert((i as u32, j as u32), c);
                        }
                        for j in row.len()..=(MAX_DEGREE as usize - i) {
                            coeffs.insert((i as u32, j as u32), 0.0);
                        }
                    }
                    return PolySurface::new(level, target, 2, coeffs);
                }
            }
        }
    }
    Err(Error::SurfaceUnavailable {
        alpha: level.alpha(),
        gamma: level.gamma(),
    })
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// One solved sample for surface fitting: grid coordinates and the solved
/// critical value there.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SurfaceSample {
    /// `(w, 0)` for one-sided targets, `(w12, w13)` for two-sided ones.
    pub coords: (f64, f64),
    /// Solved critical value.
    pub value: f64,
}

/// Quality report for a fitted surface.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitReport {
    /// Coefficient of determination (1.0 by convention for constant data).
    pub r_squared: f64,
    /// Largest absolute in-sample residual.
    pub max_abs_residual: f64,
    /// Number of samples fitted.
    pub n_samples: usize,
}

/// Fits a 6th-order surface to solver output by least squares on the
/// monomial basis with per-column scaling (normal equations are otherwise
/// ill-conditioned in the high powers).
pub fn fit_surface(
    level: Level,
    target: SurfaceTarget,
    samples: &[SurfaceSample],
) -> Result<(PolySurface, FitReport)> {
    let arity: u8 = match target {
        SurfaceTarget::COneSided => 1,
        SurfaceTarget::CUpperTwoSided => 2,
    };
    let keys: Vec<(u32, u32)> = match arity {
        1 => (0..=MAX_DEGREE).map(|i| (i, 0)).collect(),
        _ => (0..=MAX_DEGREE)
            .flat_map(|i| (0..=MAX_DEGREE - i).map(move |j| (i, j)))
            .collect(),
    };
    let p = keys.len();
    let n = samples.len();
    if n < p {
        return Err(Error::invalid(format!(
            "need at least {p} samples to fit a {}-coefficient surface, got {n}",
            p
        )));
    }

    // Design matrix with monomial columns, then column scaling.
    let mut x = nalgebra::DMatrix::<f64>::zeros(n, p);
    let mut y = nalgebra::DVector::<f64>::zeros(n);
    for (r, s) in samples.iter().enumerate() {
        let (u, v) = s.coords;
        check_coord(u, "first surface coordinate")?;
        if arity == 2 {
            check_coord(v, "second surface coordinate")?;
        }
        for (cidx, &(i, j)) in keys.iter().enumerate() {
            // Basis term for key (i, j): w^i univariate, w13^i * w12^j
            // bivariate — the same layout eval_one/eval_two read back.
            x[(r, cidx)] = match arity {
                1 => u.powi(i as i32),
                _ => v.powi(i as i32) * u.powi(j as i32),
            };
        }
        y[r] = s.value;
    }
    let scales: Vec<f64> = (0..p)
        .map(|c| {
            let m = x.column(c).amax();
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
        .collect();
    for (c, &s) in scales.iter().enumerate() {
        let mut col = x.column_mut(c);
        col /= s;
    }

    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &y;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("surface design matrix is numerically singular"))?;
    let beta_scaled = chol.solve(&xty);

    let fitted = &x * &beta_scaled;
    let resid = &y - &fitted;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let ssr: f64 = resid.iter().map(|r| r * r).sum();
    // Constant data leaves only round-off in the total sum of squares;
    // report a perfect fit by convention instead of dividing by noise.
    let const_floor = 1e-20 * n as f64 * (1.0 + mean_y * mean_y);
    let r_squared = if sst > const_floor { 1.0 - ssr / sst } else { 1.0 };
    let max_abs_residual = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let mut coeffs = BTreeMap::new();
    for (cidx, &key) in keys.iter().enumerate() {
        coeffs.insert(key, beta_scaled[cidx] / scales[cidx]);
    }
    let surface = PolySurface::new(level, target, arity, coeffs)?;
    Ok((
        surface,
        FitReport {
            r_squared,
            max_abs_residual,
            n_samples: n,
        },
    ))
}

// ---------------------------------------------------------------------------
// Default grids
// ---------------------------------------------------------------------------

/// Default one-sided fitting grid: `w in {0, 0.001, ..., 0.999}`.
pub fn default_grid_one_sided() -> Vec<f64> {
    (0..1000).map(|i| i as f64 / 1000.0).collect()
}

/// The anchor set for two-sided grids, in thousandths:
/// `{0, 0.005} u {0.01..0.1 by 0.01} u {0.15..0.9 by 0.05}
///  u {0.91..0.99 by 0.01} u {0.995}`.
fn anchor_milli() -> Vec<i64> {
    let mut g = vec![0, 5];
    g.extend((10..=100).step_by(10));
    g.extend((150..=900).step_by(50));
    g.extend((910..=990).step_by(10));
    g.push(995);
    g.sort_unstable();
    g.dedup();
    g
}

/// Default two-sided fitting grid: all feasible `(w12, w13, w23)` with
/// `w12, w13` on the anchor set and `w23` on the signed anchor set united
/// with `{-0.99, ..., 0.99}` in hundredth steps.
pub fn default_grid_two_sided() -> Vec<(f64, f64, f64)> {
    let g = anchor_milli();
    let mut w23s: Vec<i64> = g.iter().flat_map(|&v| [v, -v]).collect();
    w23s.extend((-990..=990).step_by(10));
    w23s.sort_unstable();
    w23s.dedup();

    let mut grid = Vec::new();
    for &a in &g {
        for &b in &g {
            for &c in &w23s {
                let (w12, w13, w23) = (a as f64 / 1000.0, b as f64 / 1000.0, c as f64 / 1000.0);
                if in_s_bar(w12, w13, w23) {
                    grid.push((w12, w13, w23));
                }
            }
        }
    }
    grid
}

// ---------------------------------------------------------------------------
// Text serialization
// ---------------------------------------------------------------------------

/// File-format version tag.
const FORMAT_HEADER: &str = "# ssci surface v1";

/// Renders a surface in the self-describing text format:
///
/// ```text
/// # ssci surface v1
/// target c_one_sided
/// alpha 0.05
/// gamma 0.005
/// arity 1
/// 0 0 1.6385
/// 1 0 2.4813
/// ...
/// ```
///
/// Coefficient lines are `e1 e2 value` sorted lexicographically by
/// exponent tuple; values use the shortest round-trip decimal form, so
/// write/parse is bit-exact.
pub fn surface_to_string(surface: &PolySurface) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    let _ = writeln!(out, "target {}", surface.target().as_str());
    let _ = writeln!(out, "alpha {:?}", surface.level().alpha());
    let _ = writeln!(out, "gamma {:?}", surface.level().gamma());
    let _ = writeln!(out, "arity {}", surface.arity());
    for ((e1, e2), c) in surface.coeffs() {
        let _ = writeln!(out, "{e1} {e2} {c:?}");
    }
    out
}

/// Parses the text format produced by [`surface_to_string`].
pub fn surface_from_str(text: &str) -> Result<PolySurface> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != FORMAT_HEADER {
        return Err(Error::Parse(format!(
            "unrecognized surface header {header:?}; expected {FORMAT_HEADER:?}"
        )));
    }
    let mut target = None;
    let mut alpha = None;
    let mut gamma = None;
    let mut arity = None;
    let mut coeffs = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let first = parts.next().unwrap();
        match first {
            "target" => {
                target = Some(SurfaceTarget::from_str(parts.next().unwrap_or_default())?)
            }
            "alpha" => alpha = Some(parse_f64(parts.next())?),
            "gamma" => gamma = Some(parse_f64(parts.next())?),
            "arity" => {
                arity = Some(
                    parts
                        .next()
                        .unwrap_or_default()
                        .parse::<u8>()
                        .map_err(|e| Error::Parse(format!("bad arity: {e}")))?,
                )
            }
            e1 => {
                let e1: u32 = e1
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad exponent in {line:?}: {e}")))?;
                let e2: u32 = parts
                    .next()
                    .unwrap_or_default()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad exponent in {line:?}: {e}")))?;
                let c = parse_f64(parts.next())?;
                if coeffs.insert((e1, e2), c).is_some() {
                    return Err(Error::Parse(format!("duplicate coefficient ({e1}, {e2})")));
                }
            }
        }
    }
    let level = Level::new(
        alpha.ok_or_else(|| Error::Parse("missing alpha".into()))?,
        gamma.ok_or_else(|| Error::Parse("missing gamma".into()))?,
    )?;
    let target = target.ok_or_else(|| Error::Parse("missing target".into()))?;
    let arity = arity.ok_or_else(|| Error::Parse("missing arity".into()))?;
    PolySurface::new(level, target, arity, coeffs)
}

fn parse_f64(tok: Option<&str>) -> Result<f64> {
    tok.unwrap_or_default()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number: {e}")))
}

/// Writes a surface to a file.
pub fn save_surface(surface: &PolySurface, path: &Path) -> Result<()> {
    std::fs::write(path, surface_to_string(surface))?;
    Ok(())
}

/// Loads a surface from a file.
pub fn load_surface(path: &Path) -> Result<PolySurface> {
    let text = std::fs::read_to_string(path)?;
    surface_from_str(&text)
}
