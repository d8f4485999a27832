//! Structural similarity with an 11 x 11 Gaussian window (sigma 1.5),
//! population moments and only fully covered window positions.

use crate::error::{Error, Result};

use super::basic::check_pair;

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
/// Multi-scale weights for five levels.
pub const MS_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

fn gaussian() -> [f64; WINDOW] {
    let r = (WINDOW / 2) as f64;
    let mut w = [0.0; WINDOW];
    for (k, v) in w.iter_mut().enumerate() {
        let x = k as f64 - r;
        *v = (-0.5 * x * x / (SIGMA * SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Separable valid-mode filter; output is `(h - 10) x (w - 10)`.
fn filter(img: &[f64], w: usize, h: usize, g: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut tmp = vec![0.0; h * ow];
    for j in 0..h {
        let row = &img[j * w..(j + 1) * w];
        for i in 0..ow {
            tmp[j * ow + i] = (0..WINDOW).map(|k| row[i + k] * g[k]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for j in 0..oh {
        for i in 0..ow {
            out[j * ow + i] = (0..WINDOW).map(|k| tmp[(j + k) * ow + i] * g[k]).sum();
        }
    }
    out
}

/// Mean SSIM and mean contrast-structure term.
fn ssim_parts(y: &[f64], yhat: &[f64], width: usize, range: f64) -> Result<(f64, f64)> {
    check_pair(y, yhat)?;
    if width == 0 || y.len() % width != 0 {
        return Err(Error::contract(format!("{} values do not form rows of {width}", y.len())));
    }
    let height = y.len() / width;
    if width < WINDOW || height < WINDOW {
        return Err(Error::domain(format!(
            "{width}x{height} image is smaller than the {WINDOW}x{WINDOW} window"
        )));
    }
    if !(range > 0.0) {
        return Err(Error::domain(format!("dynamic range must be positive, got {range}")));
    }
    let g = gaussian();
    let prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>();
    let mx = filter(y, width, height, &g);
    let my = filter(yhat, width, height, &g);
    let mxx = filter(&prod(y, y), width, height, &g);
    let myy = filter(&prod(yhat, yhat), width, height, &g);
    let mxy = filter(&prod(y, yhat), width, height, &g);
    let c1 = (0.01 * range).powi(2);
    let c2 = (0.03 * range).powi(2);
    let (mut s, mut cs) = (0.0, 0.0);
    for k in 0..mx.len() {
        let (ux, uy) = (mx[k], my[k]);
        let vx = mxx[k] - ux * ux;
        let vy = myy[k] - uy * uy;
        let vxy = mxy[k] - ux * uy;
        let c = (2.0 * vxy + c2) / (vx + vy + c2);
        s += (2.0 * ux * uy + c1) / (ux * ux + uy * uy + c1) * c;
        cs += c;
    }
    let n = mx.len() as f64;
    Ok((s / n, cs / n))
}

/// Mean local SSIM of two row-major images with `width` columns.
pub fn ssim(y: &[f64], yhat: &[f64], width: usize, range: f64) -> Result<f64> {
    Ok(ssim_parts(y, yhat, width, range)?.0)
}

fn halve(img: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (ow, oh) = (w / 2, h / 2);
    let mut out = Vec::with_capacity(ow * oh);
    for j in 0..oh {
        for i in 0..ow {
            let a = img[2 * j * w + 2 * i] + img[2 * j * w + 2 * i + 1];
            let b = img[(2 * j + 1) * w + 2 * i] + img[(2 * j + 1) * w + 2 * i + 1];
            out.push((a + b) / 4.0);
        }
    }
    (out, ow, oh)
}

/// Multi-scale SSIM over `levels` (1..=5) dyadic scales, with 2 x 2 mean
/// downsampling and the standard weights renormalized to the levels used.
/// Negative contrast-structure terms are clamped to zero.
pub fn ms_ssim(y: &[f64], yhat: &[f64], width: usize, range: f64, levels: usize) -> Result<f64> {
    if !(1..=MS_WEIGHTS.len()).contains(&levels) {
        return Err(Error::domain(format!("levels must be in 1..=5, got {levels}")));
    }
    let total: f64 = MS_WEIGHTS[..levels].iter().sum();
    let (mut a, mut b, mut w) = (y.to_vec(), yhat.to_vec(), width);
    let mut score = 1.0;
    for (l, &wt) in MS_WEIGHTS[..levels].iter().enumerate() {
        let (s, cs) = ssim_parts(&a, &b, w, range)?;
        let term = if l + 1 == levels { s } else { cs };
        score *= term.max(0.0).powf(wt / total);
        if l + 1 < levels {
            let h = a.len() / w;
            let (na, nw, _) = halve(&a, w, h);
            let (nb, _, _) = halve(&b, w, h);
            a = na;
            b = nb;
            w = nw;
        }
    }
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let g = gaussian();
        assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(g[0], g[10]);
    }

    #[test]
    fn equal_images_score_one() {
        let y: Vec<f64> = (0..400).map(|k| (k as f64 * 0.37).sin()).collect();
        assert!((ssim(&y, &y, 20, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((ms_ssim(&y, &y, 20, 2.0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_images_are_rejected() {
        assert!(matches!(ssim(&[0.0; 100], &[0.0; 100], 10, 1.0), Err(Error::Domain(_))));
    }
}
