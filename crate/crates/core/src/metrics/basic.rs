use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-interpolated quantile (`q` in `[0, 1]`) of unsorted values.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub(crate) fn check_pair(y: &[f64], yhat: &[f64]) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::contract(format!(
            "compared grids have {} and {} values",
            y.len(),
            yhat.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::contract("compared grids are empty"));
    }
    if let Some(k) = y.iter().chain(yhat).position(|v| !v.is_finite()) {
        let (which, k) = if k < y.len() { ("reference", k) } else { ("estimate", k - y.len()) };
        return Err(Error::domain(format!("{which} value {k} is not finite")));
    }
    Ok(())
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    let s: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((s / y.len() as f64).sqrt())
}

pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    let s: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum();
    Ok(s / y.len() as f64)
}

/// Units in which percentage errors are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapeUnit {
    /// Values as given (dBm for radio maps), absolute denominators.
    #[default]
    Dbm,
    /// dBm converted to milliwatts first.
    Linear,
}

/// Mean absolute percentage error, percent.
pub fn mape(y: &[f64], yhat: &[f64], unit: MapeUnit) -> Result<f64> {
    check_pair(y, yhat)?;
    let conv = |v: f64| match unit {
        MapeUnit::Dbm => v,
        MapeUnit::Linear => 10f64.powf(v / 10.0),
    };
    let zeros: Vec<usize> = y.iter().enumerate().filter(|(_, &v)| conv(v) == 0.0).map(|(k, _)| k).collect();
    if !zeros.is_empty() {
        let shown: Vec<String> = zeros.iter().take(10).map(|k| k.to_string()).collect();
        let more = if zeros.len() > 10 { format!(" and {} more", zeros.len() - 10) } else { String::new() };
        return Err(Error::domain(format!(
            "zero reference values at indices [{}]{more}",
            shown.join(", ")
        )));
    }
    let s: f64 = y
        .iter()
        .zip(yhat)
        .map(|(&a, &b)| {
            let a = conv(a);
            (a - conv(b)).abs() / a.abs()
        })
        .sum();
    Ok(100.0 * s / y.len() as f64)
}

/// Pearson correlation with population moments.
pub fn pearson(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat)?;
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let mh = yhat.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(yhat) {
        let (da, db) = (a - my, b - mh);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::domain("correlation is undefined for a constant grid"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// `sqrt(mean squared error over every pair + xi * sum of squared weights)`.
///
/// `pairs` are per-sample `(y, yhat)` slices pooled into one mean.
pub fn regularized_loss(pairs: &[(&[f64], &[f64])], weights: &[f64], xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::domain(format!("penalty weight must be non-negative, got {xi}")));
    }
    let (mut sum, mut n) = (0.0, 0usize);
    for (y, yhat) in pairs {
        check_pair(y, yhat)?;
        sum += y.iter().zip(yhat.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        n += y.len();
    }
    let mse = if n == 0 { 0.0 } else { sum / n as f64 };
    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    Ok((mse + xi * penalty).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0], 0.9), 1.0);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn mape_reports_zero_indices() {
        let e = mape(&[1.0, 0.0, 2.0], &[1.0, 1.0, 1.0], MapeUnit::Dbm).unwrap_err();
        assert!(e.to_string().contains("[1]"), "{e}");
    }

    #[test]
    fn linear_mape_uses_milliwatts() {
        // 0 dBm vs 10 dBm: 1 mW vs 10 mW.
        assert!((mape(&[0.0], &[10.0], MapeUnit::Linear).unwrap() - 900.0).abs() < 1e-9);
    }
}
