//! Resampling with the pixel-centre convention: output pixel `k` of `n_out`
//! samples input coordinate `(k + 0.5) * n_in / n_out - 0.5`.

use crate::error::{Error, Result};

use super::raster::Raster;

/// Cubic convolution kernel with `a = -0.5` (Catmull-Rom).
#[inline]
fn kernel(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Per output index: the four clamped source indices and their weights.
fn taps(n_in: usize, n_out: usize) -> Vec<([usize; 4], [f64; 4])> {
    let scale = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|k| {
            let x = (k as f64 + 0.5) * scale - 0.5;
            let x0 = x.floor();
            let t = x - x0;
            let mut idx = [0usize; 4];
            let mut w = [0.0; 4];
            for m in 0..4 {
                let src = x0 as i64 + m as i64 - 1;
                idx[m] = src.clamp(0, n_in as i64 - 1) as usize;
                w[m] = kernel(t - (m as f64 - 1.0));
            }
            (idx, w)
        })
        .collect()
}

/// Bicubic resize with edge clamping; same-size input is returned unchanged.
pub fn resize_bicubic(r: &Raster, out_w: usize, out_h: usize) -> Result<Raster> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::contract("resize target must be non-empty"));
    }
    if out_w == r.width && out_h == r.height {
        return Ok(r.clone());
    }
    let tx = taps(r.width, out_w);
    let ty = taps(r.height, out_h);
    // Horizontal pass into `r.height x out_w`.
    let mut tmp = vec![0.0; r.height * out_w];
    for j in 0..r.height {
        let row = &r.values[j * r.width..(j + 1) * r.width];
        for (i, (idx, w)) in tx.iter().enumerate() {
            tmp[j * out_w + i] = (0..4).map(|m| row[idx[m]] * w[m]).sum();
        }
    }
    let mut values = vec![0.0; out_h * out_w];
    for (j, (idx, w)) in ty.iter().enumerate() {
        for i in 0..out_w {
            values[j * out_w + i] = (0..4).map(|m| tmp[idx[m] * out_w + i] * w[m]).sum();
        }
    }
    Raster::new(
        out_w,
        out_h,
        values,
        [
            r.meters_per_pixel[0] * r.width as f64 / out_w as f64,
            r.meters_per_pixel[1] * r.height as f64 / out_h as f64,
        ],
        r.tag,
    )
}

/// Integer-factor nearest-neighbour upsampling: each pixel becomes a
/// `factor x factor` block.
pub fn upsample_nearest(r: &Raster, factor: usize) -> Result<Raster> {
    if factor == 0 {
        return Err(Error::contract("upsampling factor must be positive"));
    }
    let (w, h) = (r.width * factor, r.height * factor);
    let mut values = Vec::with_capacity(w * h);
    for j in 0..h {
        for i in 0..w {
            values.push(r.values[(j / factor) * r.width + i / factor]);
        }
    }
    Raster::new(
        w,
        h,
        values,
        [r.meters_per_pixel[0] / factor as f64, r.meters_per_pixel[1] / factor as f64],
        r.tag,
    )
}

/// Mean over `factor x factor` blocks; dims must be divisible by `factor`.
pub fn downsample_box(r: &Raster, factor: usize) -> Result<Raster> {
    if factor == 0 || r.width % factor != 0 || r.height % factor != 0 {
        return Err(Error::contract(format!(
            "{}x{} raster is not divisible by {factor}",
            r.width, r.height
        )));
    }
    let (w, h) = (r.width / factor, r.height / factor);
    let norm = (factor * factor) as f64;
    let mut values = vec![0.0; w * h];
    for j in 0..r.height {
        for i in 0..r.width {
            values[(j / factor) * w + i / factor] += r.values[j * r.width + i];
        }
    }
    values.iter_mut().for_each(|v| *v /= norm);
    Raster::new(
        w,
        h,
        values,
        [r.meters_per_pixel[0] * factor as f64, r.meters_per_pixel[1] * factor as f64],
        r.tag,
    )
}
