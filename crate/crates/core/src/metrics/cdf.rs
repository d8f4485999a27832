use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::basic::{check_pair, quantile_sorted};

pub const CDF_QUANTILES: [f64; 7] = [0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

/// Empirical distribution of per-receiver absolute errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCdf {
    /// Ascending.
    pub errors: Vec<f64>,
    /// `(q, error)` rows.
    pub quantiles: Vec<(f64, f64)>,
}

impl ErrorCdf {
    pub fn from_errors(mut errors: Vec<f64>) -> Self {
        errors.sort_by(f64::total_cmp);
        let quantiles = CDF_QUANTILES.iter().map(|&q| (q, quantile_sorted(&errors, q))).collect();
        Self { errors, quantiles }
    }

    /// `(error, cumulative probability)`; probability of sample `k` is `(k + 1) / n`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.errors.len() as f64;
        self.errors.iter().enumerate().map(move |(k, &e)| (e, (k + 1) as f64 / n))
    }

    pub fn median(&self) -> f64 {
        quantile_sorted(&self.errors, 0.5)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("abs_error_db,cdf\n");
        for (e, p) in self.points() {
            s.push_str(&format!("{e},{p}\n"));
        }
        s
    }
}

pub fn error_cdf(y: &[f64], yhat: &[f64]) -> Result<ErrorCdf> {
    check_pair(y, yhat)?;
    Ok(ErrorCdf::from_errors(y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).collect()))
}
