//! OLS with heteroskedasticity-robust covariance, factorial-design
//! builders, and CSV ingestion.
//!
//! This is the bridge from raw data to an [`EstimateBundle`]: fit a
//! linear model with the interest coefficient first and the
//! sign-restricted coefficients next, extract their joint robust
//! covariance, and hand the bundle to the interval constructors. The
//! covariance is stored for the sqrt(n)-scaled estimator so the interval
//! formulas apply verbatim.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ci::EstimateBundle;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    /// Rows removed during ingestion because a required cell was empty.
    n_dropped: usize,
}

impl Dataset {
    /// Builds a dataset from parallel columns. Names must be unique and
    /// non-empty; columns must have equal lengths; values must be finite.
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::invalid(format!(
                "{} column names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.trim().is_empty() {
                return Err(Error::invalid("column names must be non-empty"));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate column name {name:?}")));
            }
        }
        if let Some(first) = columns.first() {
            let n = first.len();
            if columns.iter().any(|c| c.len() != n) {
                return Err(Error::invalid("columns must have equal lengths"));
            }
        }
        if columns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset values must be finite"));
        }
        Ok(Dataset {
            names,
            columns,
            n_dropped: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Rows dropped during CSV ingestion (zero for constructed datasets).
    pub fn n_dropped(&self) -> usize {
        self.n_dropped
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Column values by name.
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| {
                Error::invalid(format!(
                    "no column named {name:?}; available: {:?}",
                    self.names
                ))
            })
    }

    /// Appends a column. Errors on duplicate names or length mismatch.
    pub fn push_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if self.has_column(name) {
            return Err(Error::invalid(format!("duplicate column name {name:?}")));
        }
        if !self.columns.is_empty() && values.len() != self.n_rows() {
            return Err(Error::invalid(format!(
                "column {name:?} has {} values for {} rows",
                values.len(),
                self.n_rows()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset values must be finite"));
        }
        self.names.push(name.to_string());
        self.columns.push(values);
        Ok(())
    }

    /// A new dataset holding the given rows (repetitions allowed — this
    /// is the bootstrap resampler).
    pub fn subset_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let n = self.n_rows();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::invalid(format!(
                "row index {bad} out of range for {n} rows"
            )));
        }
        Ok(Dataset {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            n_dropped: 0,
        })
    }

    /// Writes the dataset as CSV with a header row. Values use the
    /// shortest round-trip decimal form, so write-then-ingest reproduces
    /// them exactly.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
        w.write_record(&self.names)
            .map_err(|e| Error::Parse(e.to_string()))?;
        for r in 0..self.n_rows() {
            let row: Vec<String> = self.columns.iter().map(|c| format!("{:?}", c[r])).collect();
            w.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads the named columns from a CSV file with a header row. Rows with
/// an empty cell in any requested column are dropped (the count is
/// available as [`Dataset::n_dropped`]); a malformed non-empty cell is an
/// error naming the row and column. Columns not in `schema` are ignored.
pub fn ingest_csv(path: &Path, schema: &[&str]) -> Result<Dataset> {
    if schema.is_empty() {
        return Err(Error::invalid("schema must name at least one column"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("cannot read CSV header: {e}")))?
        .clone();
    let mut positions = Vec::with_capacity(schema.len());
    for name in schema {
        let pos = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "column {name:?} not found in CSV header {:?}",
                    headers.iter().collect::<Vec<_>>()
                ))
            })?;
        positions.push(pos);
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); schema.len()];
    let mut n_dropped = 0usize;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {}: {e}", row_idx + 1)))?;
        let cells: Vec<&str> = positions
            .iter()
            .map(|&p| record.get(p).unwrap_or(""))
            .collect();
        if cells.iter().any(|c| c.is_empty()) {
            n_dropped += 1;
            continue;
        }
        let mut parsed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}, column {:?}: cannot parse {cell:?} as a number",
                    row_idx + 1,
                    schema[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "row {}, column {:?}: non-finite value {cell:?}",
                    row_idx + 1,
                    schema[c]
                )));
            }
            parsed.push(v);
        }
        for (col, v) in columns.iter_mut().zip(parsed) {
            col.push(v);
        }
    }
    let mut data = Dataset::new(schema.iter().map(|s| s.to_string()).collect(), columns)?;
    data.n_dropped = n_dropped;
    Ok(data)
}

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

/// Which columns play which role in the regression. The design matrix is
/// assembled in the order interest, restricted, unrestricted — there is
/// no implicit intercept, so include a constant column (for example via
/// [`factorial_design`]) among the unrestricted regressors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formula {
    /// Outcome column.
    pub outcome: String,
    /// Regressor whose coefficient is the interest parameter `b`.
    pub interest: String,
    /// Regressors with sign-restricted coefficients (`d >= 0`).
    pub restricted: Vec<String>,
    /// Remaining regressors; their coefficients never enter selection.
    pub unrestricted: Vec<String>,
}

impl Formula {
    fn regressors(&self) -> Vec<&str> {
        let mut v = vec![self.interest.as_str()];
        v.extend(self.restricted.iter().map(String::as_str));
        v.extend(self.unrestricted.iter().map(String::as_str));
        v
    }
}

/// Heteroskedasticity-robust covariance flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HcFlavor {
    /// Sandwich with the small-sample scaling `n / (n - p)`.
    #[default]
    Hc1,
    /// Plain sandwich.
    Hc0,
}

/// A fitted regression: coefficients in formula order (interest first,
/// then restricted, then unrestricted), the robust covariance of the
/// sqrt(n)-scaled coefficient vector, and residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    /// Coefficient names in design order.
    pub names: Vec<String>,
    /// OLS coefficients in design order.
    pub coefficients: Vec<f64>,
    /// Robust covariance of `sqrt(n) * (coefficients - truth)`.
    pub sigma_hat: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub n: usize,
    /// How many leading coefficients after the interest one are
    /// sign-restricted.
    pub n_restricted: usize,
}

impl RegressionResult {
    /// Coefficient by regressor name.
    pub fn coefficient(&self, name: &str) -> Result<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
            .ok_or_else(|| Error::invalid(format!("no coefficient for {name:?}")))
    }

    /// The `(b, d)` sub-bundle for interval construction: the interest
    /// coefficient, the restricted coefficients, and their covariance
    /// block.
    pub fn bundle(&self) -> Result<EstimateBundle> {
        let m = 1 + self.n_restricted;
        let sigma: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| self.sigma_hat[i][j]).collect())
            .collect();
        EstimateBundle::new(
            self.coefficients[0],
            self.coefficients[1..m].to_vec(),
            sigma,
            self.n as u64,
        )
    }
}

/// Relative eigenvalue threshold below which the design is treated as
/// rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Fits the formula by OLS and computes the requested
/// heteroskedasticity-robust covariance for the sqrt(n)-scaled
/// estimator. Errors on rank-deficient designs, naming the columns that
/// are collinear with their predecessors.
pub fn ols_fit(data: &Dataset, formula: &Formula, hc: HcFlavor) -> Result<RegressionResult> {
    let names = formula.regressors();
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(*name) {
            return Err(Error::RankDeficient {
                columns: vec![name.to_string()],
            });
        }
    }
    let y_col = data.column(&formula.outcome)?;
    let cols: Vec<&[f64]> = names
        .iter()
        .map(|n| data.column(n))
        .collect::<Result<_>>()?;
    let n = data.n_rows();
    let p = cols.len();
    if n <= p {
        return Err(Error::invalid(format!(
            "need more rows ({n}) than regressors ({p})"
        )));
    }

    let x = DMatrix::from_fn(n, p, |r, c| cols[c][r]);
    let y = DVector::from_column_slice(y_col);
    let xtx = x.transpose() * &x;
    let eigs = xtx.clone().symmetric_eigenvalues();
    let max_eig = eigs.iter().fold(0.0f64, |m, &e| m.max(e));
    if eigs.iter().any(|&e| e < RANK_TOL * max_eig.max(1.0)) {
        return Err(Error::RankDeficient {
            columns: collinear_columns(&x, &names),
        });
    }
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::RankDeficient {
            columns: collinear_columns(&x, &names),
        })?;
    let coef = chol.solve(&(x.transpose() * &y));
    let resid = &y - &x * &coef;

    // Sandwich: n * (X'X)^-1 [sum_i e_i^2 x_i x_i'] (X'X)^-1, with the
    // HC1 degree-of-freedom factor n / (n - p) when requested.
    let mut weighted = x.clone();
    for (r, e) in resid.iter().enumerate() {
        let w = e * e;
        for c in 0..p {
            weighted[(r, c)] *= w;
        }
    }
    let meat = x.transpose() * weighted;
    let bread = chol.inverse();
    let scale = match hc {
        HcFlavor::Hc0 => n as f64,
        HcFlavor::Hc1 => n as f64 * n as f64 / (n - p) as f64,
    };
    let mut sigma = (&bread * meat * &bread) * scale;
    // Symmetrize round-off before anything downstream checks symmetry.
    for i in 0..p {
        for j in 0..i {
            let avg = 0.5 * (sigma[(i, j)] + sigma[(j, i)]);
            sigma[(i, j)] = avg;
            sigma[(j, i)] = avg;
        }
    }

    Ok(RegressionResult {
        names: names.iter().map(|s| s.to_string()).collect(),
        coefficients: coef.iter().copied().collect(),
        sigma_hat: (0..p)
            .map(|i| (0..p).map(|j| sigma[(i, j)]).collect())
            .collect(),
        residuals: resid.iter().copied().collect(),
        n,
        n_restricted: formula.restricted.len(),
    })
}

/// Names the columns that are (numerically) linear combinations of their
/// predecessors, by thresholded Gram-Schmidt in design order.
fn collinear_columns(x: &DMatrix<f64>, names: &[&str]) -> Vec<String> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut collinear = Vec::new();
    for c in 0..x.ncols() {
        let col = DVector::from_iterator(x.nrows(), x.column(c).iter().copied());
        let norm0 = col.norm();
        let mut r = col;
        for b in &basis {
            let proj = b.dot(&r);
            r -= b * proj;
        }
        if r.norm() <= 1e-8 * norm0.max(1.0) {
            collinear.push(names[c].to_string());
        } else {
            let norm = r.norm();
            basis.push(r / norm);
        }
    }
    collinear
}

// ---------------------------------------------------------------------------
// Factorial designs
// ---------------------------------------------------------------------------

/// How a 2x2 factorial is parameterized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorialMode {
    /// Regressors `(const, T1, T2, T1*T2)`: the last coefficient is the
    /// interaction effect.
    Interaction,
    /// Regressors `(const, T1 - T1*T2, T2 - T1*T2, T1*T2)`: the last
    /// coefficient is the total effect of receiving both treatments.
    Both,
}

/// Derived regressor columns appended by [`factorial_design`]:
/// `const` plus, in `Both` mode, `t1_only` and `t2_only`.
pub const FACTORIAL_CONST: &str = "const";
pub const FACTORIAL_T1T2: &str = "t1t2";
pub const FACTORIAL_T1_ONLY: &str = "t1_only";
pub const FACTORIAL_T2_ONLY: &str = "t2_only";

/// Builds the factorial regressor columns from two binary treatment
/// columns, returning a copy of the dataset with the derived columns
/// appended. In `Interaction` mode the regressors are `const`, the two
/// original treatment columns, and `t1t2`; in `Both` mode they are
/// `const`, `t1_only`, `t2_only`, and `t1t2`.
pub fn factorial_design(
    data: &Dataset,
    t1: &str,
    t2: &str,
    mode: FactorialMode,
) -> Result<Dataset> {
    let c1 = data.column(t1)?.to_vec();
    let c2 = data.column(t2)?.to_vec();
    for (name, col) in [(t1, &c1), (t2, &c2)] {
        if col.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::invalid(format!(
                "treatment column {name:?} must be binary (0/1)"
            )));
        }
    }
    let both: Vec<f64> = c1.iter().zip(&c2).map(|(&a, &b)| a * b).collect();
    let mut out = data.clone();
    out.push_column(FACTORIAL_CONST, vec![1.0; data.n_rows()])?;
    if mode == FactorialMode::Both {
        out.push_column(
            FACTORIAL_T1_ONLY,
            c1.iter().zip(&both).map(|(&a, &b)| a - b).collect(),
        )?;
        out.push_column(
            FACTORIAL_T2_ONLY,
            c2.iter().zip(&both).map(|(&a, &b)| a - b).collect(),
        )?;
    }
    out.push_column(FACTORIAL_T1T2, both)?;
    Ok(out)
}
