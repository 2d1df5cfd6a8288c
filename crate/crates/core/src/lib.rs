//! Short and simple adaptive confidence intervals.
//!
//! This crate implements one- and two-sided confidence intervals for a
//! scalar parameter that adapt to nuisance parameters with known signs
//! (for example, control-group effects known to be non-negative). The
//! adaptive interval intersects the standard interval with an interval
//! tuned to be short when the sign-restricted nuisances are near their
//! boundary, and a Monte Carlo critical value removes the conservativeness
//! of the naive intersection. The result is never much longer than the
//! standard interval and is substantially shorter when the data place the
//! nuisances near the restriction boundary.
//!
//! Module map:
//!
//! * [`gauss`] - standard-normal CDF/quantile, correlation-structure types,
//!   and reproducible seeded samplers for the reduced Gaussian forms;
//! * [`critval`] - Monte Carlo solvers for the one-sided critical value
//!   `c(w)` and the two-sided pair `(c_lower, c_upper)`;
//! * [`surface`] - published polynomial response surfaces for those
//!   critical values, plus fitting of new surfaces from solver output;
//! * [`select`] - exhaustive subset selection of the control blocks that
//!   maximize the projection correlation under weight-sign constraints;
//! * [`ci`] - interval assembly from standardized or raw estimates;
//! * [`regress`] - OLS with heteroskedasticity-robust covariance, factorial
//!   designs, and CSV ingestion;
//! * [`studies`] - reproducible simulation studies: expected-length curves
//!   and surfaces, coverage scans, and a bootstrap calibration harness.

pub mod ci;
pub mod critval;
pub mod error;
pub mod gauss;
pub mod regress;
pub mod select;
pub mod studies;
pub mod surface;

pub use error::{Error, Result};
