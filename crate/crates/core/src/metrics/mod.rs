//! Map comparison metrics and reports.

pub mod basic;
pub mod cdf;
pub mod report;
pub mod ssim;

pub use basic::{mae, mape, pearson, quantile, quantile_sorted, regularized_loss, rmse, MapeUnit};
pub use cdf::{error_cdf, ErrorCdf};
pub use report::{evaluate, MetricOptions, MetricsReport, SampleMetrics, Summary};
pub use ssim::{ms_ssim, ssim};
