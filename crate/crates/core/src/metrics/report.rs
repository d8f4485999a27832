use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{atomic_write, to_json};
use crate::radiomap::RadioMap;

use super::basic::{mae, mape, pearson, rmse, MapeUnit};
use super::cdf::ErrorCdf;
use super::ssim::{ms_ssim, ssim};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    /// SSIM dynamic range `L`, dB.
    pub ssim_range: f64,
    pub mape_unit: MapeUnit,
    /// Multi-scale SSIM levels; single-scale when absent.
    pub ms_ssim_levels: Option<usize>,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            ssim_range: 120.0,
            mape_unit: MapeUnit::Dbm,
            ms_ssim_levels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rmse_db: f64,
    pub mae_db: f64,
    pub mape_percent: f64,
    /// `None` when either side is constant.
    pub pearson_r: Option<f64>,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub id: String,
    #[serde(flatten)]
    pub metrics: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub options: MetricOptions,
    pub receivers: usize,
    /// All receivers of all samples pooled; SSIM is the per-sample mean.
    pub pooled: Summary,
    /// Means of the per-sample values.
    pub per_sample_mean: Summary,
    pub samples: Vec<SampleMetrics>,
    pub error_cdf: ErrorCdf,
}

fn summary(y: &[f64], yhat: &[f64], width: usize, opts: &MetricOptions) -> Result<Summary> {
    let r = match pearson(y, yhat) {
        Ok(r) => Some(r),
        Err(Error::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Summary {
        rmse_db: rmse(y, yhat)?,
        mae_db: mae(y, yhat)?,
        mape_percent: mape(y, yhat, opts.mape_unit)?,
        pearson_r: r,
        ssim: match opts.ms_ssim_levels {
            Some(l) => ms_ssim(y, yhat, width, opts.ssim_range, l)?,
            None => ssim(y, yhat, width, opts.ssim_range)?,
        },
    })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Scores `(id, target, estimate)` triples.
pub fn evaluate(pairs: &[(String, &RadioMap, &RadioMap)], opts: &MetricOptions) -> Result<MetricsReport> {
    if pairs.is_empty() {
        return Err(Error::contract("nothing to evaluate"));
    }
    let mut samples = Vec::with_capacity(pairs.len());
    let (mut ys, mut hs) = (Vec::new(), Vec::new());
    for (id, y, yhat) in pairs {
        if (y.nx(), y.ny()) != (yhat.nx(), yhat.ny()) {
            return Err(Error::contract(format!(
                "sample {id}: target is {}x{}, estimate {}x{}",
                y.nx(),
                y.ny(),
                yhat.nx(),
                yhat.ny()
            )));
        }
        let m = summary(&y.power_dbm, &yhat.power_dbm, y.nx(), opts)
            .map_err(|e| Error::contract(format!("sample {id}: {e}")))?;
        samples.push(SampleMetrics {
            id: id.clone(),
            metrics: m,
        });
        ys.extend_from_slice(&y.power_dbm);
        hs.extend_from_slice(&yhat.power_dbm);
    }
    let per_sample_mean = Summary {
        rmse_db: mean(samples.iter().map(|s| s.metrics.rmse_db)),
        mae_db: mean(samples.iter().map(|s| s.metrics.mae_db)),
        mape_percent: mean(samples.iter().map(|s| s.metrics.mape_percent)),
        pearson_r: if samples.iter().all(|s| s.metrics.pearson_r.is_some()) {
            Some(mean(samples.iter().filter_map(|s| s.metrics.pearson_r)))
        } else {
            None
        },
        ssim: mean(samples.iter().map(|s| s.metrics.ssim)),
    };
    let pooled = Summary {
        rmse_db: rmse(&ys, &hs)?,
        mae_db: mae(&ys, &hs)?,
        mape_percent: mape(&ys, &hs, opts.mape_unit)?,
        pearson_r: pearson(&ys, &hs).ok(),
        ssim: per_sample_mean.ssim,
    };
    let error_cdf = ErrorCdf::from_errors(ys.iter().zip(&hs).map(|(a, b)| (a - b).abs()).collect());
    Ok(MetricsReport {
        options: opts.clone(),
        receivers: ys.len(),
        pooled,
        per_sample_mean,
        samples,
        error_cdf,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl MetricsReport {
    pub fn samples_csv(&self) -> String {
        let mut s = String::from("id,rmse_db,mae_db,mape_percent,pearson_r,ssim\n");
        let mut row = |id: &str, m: &Summary| {
            s.push_str(&format!(
                "{id},{},{},{},{},{}\n",
                m.rmse_db,
                m.mae_db,
                m.mape_percent,
                opt(m.pearson_r),
                m.ssim
            ))
        };
        for x in &self.samples {
            row(&x.id, &x.metrics);
        }
        row("pooled", &self.pooled);
        row("per_sample_mean", &self.per_sample_mean);
        s
    }

    /// Writes `report.json`, `samples.csv`, `error_cdf.csv` and `error_cdf.png` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        atomic_write(&dir.join("report.json"), to_json(self).as_bytes())?;
        atomic_write(&dir.join("samples.csv"), self.samples_csv().as_bytes())?;
        atomic_write(&dir.join("error_cdf.csv"), self.error_cdf.to_csv().as_bytes())?;
        crate::render::write_cdf_png(&self.error_cdf, &dir.join("error_cdf.png"))
    }
}
