//! Separable bilinear (triangle-filter) resampling.
//!
//! When downscaling, the triangle support widens with the scale factor so
//! every input sample contributes, the same behaviour as the `Triangle`
//! filter of common image libraries. Same-size resampling is the identity.

use crate::image::{FloatImage, Image, CHANNELS};

/// Sparse weights for resampling one axis: for every output index, the
/// contributing input indices and their normalised weights.
#[derive(Debug, Clone)]
pub struct AxisWeights {
    pub taps: Vec<Vec<(usize, f64)>>,
}

impl AxisWeights {
    pub fn new(in_len: usize, out_len: usize) -> Self {
        assert!(in_len > 0 && out_len > 0);
        let scale = in_len as f64 / out_len as f64;
        let support = scale.max(1.0);
        let taps = (0..out_len)
            .map(|o| {
                let center = (o as f64 + 0.5) * scale - 0.5;
                let lo = (center - support).floor() as isize;
                let hi = (center + support).ceil() as isize;
                let mut taps: Vec<(usize, f64)> = Vec::new();
                for i in lo..=hi {
                    let w = 1.0 - ((i as f64 - center) / support).abs();
                    if w <= 0.0 {
                        continue;
                    }
                    let idx = i.clamp(0, in_len as isize - 1) as usize;
                    match taps.iter_mut().find(|(j, _)| *j == idx) {
                        Some(t) => t.1 += w,
                        None => taps.push((idx, w)),
                    }
                }
                let total: f64 = taps.iter().map(|t| t.1).sum();
                taps.iter_mut().for_each(|t| t.1 /= total);
                taps
            })
            .collect();
        Self { taps }
    }

    /// Dense `out_len x in_len` matrix, row-major.
    pub fn dense(&self, in_len: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.taps.len() * in_len];
        for (o, taps) in self.taps.iter().enumerate() {
            for &(i, w) in taps {
                m[o * in_len + i] += w;
            }
        }
        m
    }
}

/// Resample a single-channel plane of `w x h` values to `nw x nh`.
pub fn resize_plane(plane: &[f64], w: usize, h: usize, nw: usize, nh: usize) -> Vec<f64> {
    resize_interleaved(plane, w, h, nw, nh, 1)
}

fn resize_interleaved(
    src: &[f64],
    w: usize,
    h: usize,
    nw: usize,
    nh: usize,
    ch: usize,
) -> Vec<f64> {
    let xw = AxisWeights::new(w, nw);
    let yw = AxisWeights::new(h, nh);
    // horizontal pass
    let mut tmp = vec![0.0; nw * h * ch];
    for y in 0..h {
        let row = &src[y * w * ch..(y + 1) * w * ch];
        let out = &mut tmp[y * nw * ch..(y + 1) * nw * ch];
        for (ox, taps) in xw.taps.iter().enumerate() {
            for &(ix, wt) in taps {
                for c in 0..ch {
                    out[ox * ch + c] += wt * row[ix * ch + c];
                }
            }
        }
    }
    // vertical pass
    let mut dst = vec![0.0; nw * nh * ch];
    for (oy, taps) in yw.taps.iter().enumerate() {
        let out = &mut dst[oy * nw * ch..(oy + 1) * nw * ch];
        for &(iy, wt) in taps {
            let row = &tmp[iy * nw * ch..(iy + 1) * nw * ch];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += wt * v;
            }
        }
    }
    dst
}

pub fn resize_float(img: &FloatImage, nw: u32, nh: u32) -> FloatImage {
    let data = resize_interleaved(
        &img.data,
        img.width as usize,
        img.height as usize,
        nw as usize,
        nh as usize,
        CHANNELS,
    );
    FloatImage {
        width: nw,
        height: nh,
        data,
    }
}

/// Resize an image, rounding and clamping the result.
pub fn resize(img: &Image, nw: u32, nh: u32) -> Image {
    if img.dimensions() == (nw, nh) {
        return img.clone();
    }
    resize_float(&img.to_float(), nw, nh).to_image()
}
