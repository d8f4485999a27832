//! PNG rendering of radio maps and error CDFs.

use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ImageEncoder, Rgb, RgbImage};

use crate::error::Result;
use crate::formats::atomic_write;
use crate::metrics::ErrorCdf;
use crate::radiomap::RadioMap;

/// Heatmap colour scale, dBm.
pub const HEATMAP_RANGE: (f64, f64) = (-120.0, -40.0);

/// Viridis control points.
const VIRIDIS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

pub fn colormap(u: f64) -> Rgb<u8> {
    let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) };
    let x = u * (VIRIDIS.len() - 1) as f64;
    let k = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let t = x - k as f64;
    let c = |m: usize| (VIRIDIS[k][m] + t * (VIRIDIS[k + 1][m] - VIRIDIS[k][m])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out).write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::Rgb8)?;
    Ok(out)
}

/// Heatmap with `scale` pixels per receiver; row 0 (smallest `y`) at the bottom.
pub fn heatmap(map: &RadioMap, scale: u32) -> RgbImage {
    let (nx, ny) = (map.nx() as u32, map.ny() as u32);
    let (lo, hi) = HEATMAP_RANGE;
    let s = scale.max(1);
    RgbImage::from_fn(nx * s, ny * s, |x, y| {
        let i = (x / s) as usize;
        let j = (ny - 1 - y / s) as usize;
        colormap((map.at(i, j) - lo) / (hi - lo))
    })
}

pub fn write_heatmap_png(map: &RadioMap, path: &Path) -> Result<()> {
    atomic_write(path, &encode_png(&heatmap(map, 4))?)
}

fn line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, c);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Step plot of the CDF on a 0 to max-error axis with tenth gridlines.
pub fn cdf_plot(cdf: &ErrorCdf) -> RgbImage {
    const W: i64 = 640;
    const H: i64 = 480;
    const M: i64 = 40;
    let mut img = RgbImage::from_pixel(W as u32, H as u32, Rgb([255, 255, 255]));
    let grey = Rgb([220, 220, 220]);
    let black = Rgb([0, 0, 0]);
    let (pw, ph) = (W - 2 * M, H - 2 * M);
    for k in 0..=10 {
        let x = M + pw * k / 10;
        let y = M + ph * k / 10;
        line(&mut img, (x, M), (x, M + ph), grey);
        line(&mut img, (M, y), (M + pw, y), grey);
    }
    line(&mut img, (M, M + ph), (M + pw, M + ph), black);
    line(&mut img, (M, M), (M, M + ph), black);
    let emax = cdf.errors.last().copied().unwrap_or(0.0).max(1e-12);
    let to_px = |e: f64, p: f64| {
        (
            M + (e / emax * pw as f64).round() as i64,
            M + ph - (p * ph as f64).round() as i64,
        )
    };
    let blue = Rgb([31, 119, 180]);
    let mut prev = to_px(0.0, 0.0);
    for (e, p) in cdf.points() {
        let a = to_px(e, 0.0);
        let b = to_px(e, p);
        line(&mut img, prev, (a.0, prev.1), blue);
        line(&mut img, (a.0, prev.1), b, blue);
        prev = b;
    }
    img
}

pub fn write_cdf_png(cdf: &ErrorCdf, path: &Path) -> Result<()> {
    atomic_write(path, &encode_png(&cdf_plot(cdf))?)
}
