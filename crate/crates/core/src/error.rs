//! Error type shared across the crate.
//!
//! Input validation problems and solver failures are kept as distinct
//! variants so callers (notably the CLI) can map them to different exit
//! codes.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A correlation triple is outside the feasible region for the
    /// two-sided reduced form (the region where the implied 3x3 covariance
    /// matrix is a genuine covariance matrix).
    #[error("correlation triple ({w12}, {w13}, {w23}) is outside the feasible region")]
    OutsideFeasibleRegion { w12: f64, w13: f64, w23: f64 },

    /// An iterative solver failed to converge. Carries the last bracket so
    /// the caller can diagnose the failure.
    #[error("{what}: no convergence after {iterations} iterations (last bracket [{lo}, {hi}])")]
    SolverFailure {
        what: String,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    /// A root is not bracketed by the theoretical bracket, which indicates
    /// either a Monte Carlo sample far out in the tail or an internal bug.
    #[error("{what}: root not bracketed on [{lo}, {hi}] (f(lo)={flo:.6}, f(hi)={fhi:.6})")]
    NotBracketed {
        what: String,
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    /// The upper critical value passed to the lower-arm solver is below the
    /// feasibility threshold, so no lower-arm value attains the requested
    /// coverage.
    #[error("upper critical value {c_upper} is below the feasibility bound {lower_bound}")]
    InfeasibleUpperValue { c_upper: f64, lower_bound: f64 },

    /// No published response surface exists for the requested level.
    #[error("no built-in surface for alpha={alpha}, gamma={gamma}; solve exactly or fit one")]
    SurfaceUnavailable { alpha: f64, gamma: f64 },

    /// Subset enumeration was asked for more sign-restricted controls than
    /// the exhaustive-search cap supports.
    #[error(
        "{k} sign-restricted controls exceeds the exhaustive-search cap of {max}; \
         reduce the number of restricted controls or aggregate them"
    )]
    TooManyControls { k: usize, max: usize },

    /// The regression design matrix does not have full column rank.
    #[error("design matrix is rank deficient; suspect columns: {columns:?}")]
    RankDeficient { columns: Vec<String> },

    /// A malformed data file (CSV or JSON).
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor for [`Error::InvalidInput`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors that indicate bad caller input rather than an
    /// internal numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::OutsideFeasibleRegion { .. }
                | Error::SurfaceUnavailable { .. }
                | Error::TooManyControls { .. }
                | Error::RankDeficient { .. }
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
