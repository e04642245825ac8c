//! Independent reference implementations used as test oracles. Nothing
//! here calls into the library's own resampling, DCT or ROC code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use pubmark_core::{generate_image, score, surrogate_float, surrogate_gradient, CorpusSpec, Direction, Image};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Direct pHash: per-pixel grayscale, dense triangle-filter resampling and
// the DCT evaluated from its cosine-sum definition.

pub const N: usize = 32;

pub fn gray(img: &Image) -> Vec<Vec<f64>> {
    (0..img.height())
        .map(|y| {
            (0..img.width())
                .map(|x| {
                    let [r, g, b] = img.pixel(x, y);
                    0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)
                })
                .collect()
        })
        .collect()
}

/// Weight of every input sample for output sample `o`, out of `n` inputs.
pub fn triangle_weights(n: usize, o: usize) -> Vec<f64> {
    let scale = n as f64 / N as f64;
    let radius = if scale > 1.0 { scale } else { 1.0 };
    let center = (o as f64 + 0.5) * scale - 0.5;
    let mut w = vec![0.0; n];
    let first = (center - radius).floor() as i64;
    let last = (center + radius).ceil() as i64;
    for i in first..=last {
        let t = 1.0 - (i as f64 - center).abs() / radius;
        if t > 0.0 {
            w[i.max(0).min(n as i64 - 1) as usize] += t;
        }
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

pub fn shrink(plane: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (h, w) = (plane.len(), plane[0].len());
    let wy: Vec<Vec<f64>> = (0..N).map(|o| triangle_weights(h, o)).collect();
    let wx: Vec<Vec<f64>> = (0..N).map(|o| triangle_weights(w, o)).collect();
    let mut out = vec![vec![0.0; N]; N];
    for oy in 0..N {
        for ox in 0..N {
            let mut acc = 0.0;
            for y in 0..h {
                if wy[oy][y] == 0.0 {
                    continue;
                }
                for x in 0..w {
                    acc += wy[oy][y] * wx[ox][x] * plane[y][x];
                }
            }
            out[oy][ox] = acc;
        }
    }
    out
}

pub fn dct2(f: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let alpha = |k: usize| if k == 0 { (1.0 / N as f64).sqrt() } else { (2.0 / N as f64).sqrt() };
    let mut c = vec![vec![0.0; N]; N];
    for u in 0..N {
        for v in 0..N {
            let mut acc = 0.0;
            for y in 0..N {
                for x in 0..N {
                    acc += f[y][x]
                        * ((2 * y + 1) as f64 * u as f64 * PI / (2 * N) as f64).cos()
                        * ((2 * x + 1) as f64 * v as f64 * PI / (2 * N) as f64).cos();
                }
            }
            c[u][v] = alpha(u) * alpha(v) * acc;
        }
    }
    c
}

pub fn oracle_hash(img: &Image) -> u64 {
    let c = dct2(&shrink(&gray(img)));
    let ac: Vec<f64> = (1..64).map(|k| c[k / 8][k % 8]).collect();
    let mut sorted = ac.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[31];
    let mut bits = 0u64;
    for (k, &v) in ac.iter().enumerate() {
        // bit 0 of the hash is the DC slot and stays clear
        if v > median + 1e-6 {
            bits |= 1u64 << (63 - (k + 1));
        }
    }
    bits
}

pub fn noise_image(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Image {
    let data = (0..w * h * 3).map(|_| rng.gen()).collect();
    Image::new(w, h, data).unwrap()
}

pub fn phash_fixtures() -> Vec<Image> {
    let mut out = Vec::new();
    let sizes = [(32, 32), (64, 64), (100, 75), (47, 120), (256, 256), (20, 24), (33, 31)];
    for i in 0..36 {
        let (w, h) = sizes[i % sizes.len()];
        out.push(generate_image(
            &CorpusSpec {
                seed: 900 + i as u64,
                count: 1,
                width: w,
                height: h,
            },
            0,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..14 {
        let (w, h) = sizes[i % sizes.len()];
        out.push(noise_image(&mut rng, w, h));
    }
    out
}

/// AUC by counting concordant pairs, ties counting half.
pub fn brute_force_auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Largest relative error between the analytic surrogate gradient and a
/// central difference with step `h`, over `coords` random coordinates on
/// each of `images` synthetic images. Coordinates whose analytic gradient is
/// negligible next to the largest one are skipped.
pub fn gradient_fd_worst(images: usize, coords: usize, h: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = CorpusSpec {
        seed: 31,
        count: 2 * images,
        width: 96,
        height: 80,
    };
    let mut worst: f64 = 0.0;
    for i in 0..images {
        let x = generate_image(&spec, i).to_float();
        let other = surrogate_float(&generate_image(&spec, i + images).to_float());
        let g = surrogate_gradient(&x, Direction::Ascent, &other);
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for _ in 0..coords {
            let k = loop {
                let k = rng.gen_range(0..x.data.len());
                if g[k].abs() > 1e-3 * gmax {
                    break k;
                }
            };
            let mut plus = x.clone();
            plus.data[k] += h;
            let mut minus = x.clone();
            minus.data[k] -= h;
            let fd = (score(&surrogate_float(&plus), &other) - score(&surrogate_float(&minus), &other)) / (2.0 * h);
            worst = worst.max((fd - g[k]).abs() / g[k].abs());
        }
    }
    worst
}
