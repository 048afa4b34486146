//! Estimate the distribution of a continuous variable observed only as
//! binned frequencies.
//!
//! The central estimator is a monotone interpolating cubic spline through
//! the cumulative relative frequencies ([`mics`]). Its derivative gives a
//! density, and quantiles and moments follow from the fitted pieces. The
//! [`baselines`] module holds the usual comparison methods and [`sim`] runs
//! the seeded Monte-Carlo comparison against known distributions.
//!
//! ```
//! use bincdf::{binned::{validate_table, to_cumulative, RawTable}, mics::MonotoneCubicCdf};
//!
//! let table = validate_table(RawTable::counts(vec![0.0, 1.0, 2.0, 4.0], vec![10.0, 25.0, 15.0]))?;
//! let spline = MonotoneCubicCdf::fit(&to_cumulative(&table))?;
//! let median = spline.quantile(0.5)?;
//! assert!((spline.cdf(median) - 0.5).abs() < 1e-10);
//! # Ok::<(), bincdf::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod binned;
pub mod cli;
pub mod datasets;
pub mod distributions;
mod error;
pub mod io;
pub mod mics;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
