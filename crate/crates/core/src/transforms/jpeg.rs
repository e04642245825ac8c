//! Baseline JPEG round trip without the entropy coder.
//!
//! Colour conversion, 4:2:0 chroma subsampling, 8x8 DCT, quantisation with
//! the Annex K tables scaled as libjpeg does, then the matching decode with
//! triangle ("fancy") chroma upsampling. Huffman coding is lossless and
//! therefore skipped.

use crate::dct::Dct8;
use crate::image::{clamp_u8, Image};

#[rustfmt::skip]
const LUMA_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61,
    12, 12, 14, 19, 26, 58, 60, 55,
    14, 13, 16, 24, 40, 57, 69, 56,
    14, 17, 22, 29, 51, 87, 80, 62,
    18, 22, 37, 56, 68, 109, 103, 77,
    24, 35, 55, 64, 81, 104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
];

#[rustfmt::skip]
const CHROMA_TABLE: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Quantisation table for `quality` in `1..=100`, row-major `[u][v]`.
pub fn scaled_table(base: &[u16; 64], quality: u8) -> [f64; 64] {
    let q = u32::from(quality.clamp(1, 100));
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0.0; 64];
    for (o, &b) in out.iter_mut().zip(base) {
        *o = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as f64;
    }
    out
}

pub fn luma_table(quality: u8) -> [f64; 64] {
    scaled_table(&LUMA_TABLE, quality)
}

pub fn chroma_table(quality: u8) -> [f64; 64] {
    scaled_table(&CHROMA_TABLE, quality)
}

struct Plane {
    w: usize,
    h: usize,
    data: Vec<f64>,
}

impl Plane {
    fn at(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.w as isize - 1) as usize;
        let y = y.clamp(0, self.h as isize - 1) as usize;
        self.data[y * self.w + x]
    }
}

/// Quantise and dequantise every 8x8 block of `plane` in place. Edge blocks
/// are padded by replicating the last row and column.
fn roundtrip_blocks(plane: &mut Plane, table: &[f64; 64]) {
    let dct = Dct8::get();
    for by in (0..plane.h).step_by(8) {
        for bx in (0..plane.w).step_by(8) {
            let mut block = [[0.0; 8]; 8];
            for (y, row) in block.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    *v = plane.at((bx + x) as isize, (by + y) as isize) - 128.0;
                }
            }
            let mut coef = dct.forward(&block);
            for u in 0..8 {
                for v in 0..8 {
                    let q = table[u * 8 + v];
                    coef[u][v] = (coef[u][v] / q).round() * q;
                }
            }
            let back = dct.inverse(&coef);
            for y in 0..8 {
                for x in 0..8 {
                    let (px, py) = (bx + x, by + y);
                    if px < plane.w && py < plane.h {
                        plane.data[py * plane.w + px] = (back[y][x] + 128.0).round().clamp(0.0, 255.0);
                    }
                }
            }
        }
    }
}

pub fn jpeg_roundtrip(img: &Image, quality: u8) -> Image {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut y_plane = Plane { w, h, data: Vec::with_capacity(w * h) };
    let mut cb_full = Vec::with_capacity(w * h);
    let mut cr_full = Vec::with_capacity(w * h);
    for px in img.as_bytes().chunks_exact(3) {
        let (r, g, b) = (f64::from(px[0]), f64::from(px[1]), f64::from(px[2]));
        y_plane.data.push((0.299 * r + 0.587 * g + 0.114 * b).round());
        cb_full.push(-0.168_736 * r - 0.331_264 * g + 0.5 * b + 128.0);
        cr_full.push(0.5 * r - 0.418_688 * g - 0.081_312 * b + 128.0);
    }

    let (cw, ch) = (w.div_ceil(2), h.div_ceil(2));
    let subsample = |full: &[f64]| {
        let mut data = Vec::with_capacity(cw * ch);
        for cy in 0..ch {
            for cx in 0..cw {
                let mut sum = 0.0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let x = (2 * cx + dx).min(w - 1);
                        let y = (2 * cy + dy).min(h - 1);
                        sum += full[y * w + x];
                    }
                }
                data.push((sum / 4.0).round().clamp(0.0, 255.0));
            }
        }
        Plane { w: cw, h: ch, data }
    };
    let mut cb = subsample(&cb_full);
    let mut cr = subsample(&cr_full);

    roundtrip_blocks(&mut y_plane, &luma_table(quality));
    let ctable = chroma_table(quality);
    roundtrip_blocks(&mut cb, &ctable);
    roundtrip_blocks(&mut cr, &ctable);

    let upsample = |p: &Plane, x: usize, y: usize| {
        let fx = (x as f64 + 0.5) / 2.0 - 0.5;
        let fy = (y as f64 + 0.5) / 2.0 - 0.5;
        let (x0, y0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - x0, fy - y0);
        let (x0, y0) = (x0 as isize, y0 as isize);
        let top = p.at(x0, y0) * (1.0 - tx) + p.at(x0 + 1, y0) * tx;
        let bottom = p.at(x0, y0 + 1) * (1.0 - tx) + p.at(x0 + 1, y0 + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    };

    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let yy = y_plane.data[y * w + x];
            let cbv = upsample(&cb, x, y) - 128.0;
            let crv = upsample(&cr, x, y) - 128.0;
            out.push(clamp_u8(yy + 1.402 * crv));
            out.push(clamp_u8(yy - 0.344_136 * cbv - 0.714_136 * crv));
            out.push(clamp_u8(yy + 1.772 * cbv));
        }
    }
    Image::new(img.width(), img.height(), out).expect("same dimensions")
}
