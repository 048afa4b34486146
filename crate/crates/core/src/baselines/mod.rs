//! Comparison estimators for binned data.
//!
//! Every estimator produces an [`EstimatorReport`] with the same content as
//! the spline: quantiles at requested levels, mean, standard deviation and
//! interquartile range.

mod ecdf;
mod heuristic;
mod kernel;
mod rcfp;
mod report;

pub use ecdf::{ecdf_estimator, BinnedEcdf};
pub use heuristic::{
    heuristic_stats, linear_quantile, midpoints, pareto_tail, HeuristicOptions, ParetoTail, SdForm,
};
pub use kernel::{kernel_estimator, silverman_bandwidth, KernelCdf, KernelOptions, DEFAULT_NOMINAL_N};
pub use rcfp::{rcfp_estimator, LinearCdf};
pub use report::{check_levels, spline_report, EstimatorReport, Method, ReportMeta, DEFAULT_LEVELS};
