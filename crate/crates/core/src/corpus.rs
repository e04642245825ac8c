//! Seeded synthetic image corpus.
//!
//! Each image is a linear colour gradient overlaid with randomly placed
//! rectangles and ellipses. Colours are drawn from `[28, 227]` so that the
//! brightness transforms in the standard suite stay clear of saturation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::image::Image;

const COLOR_MIN: u8 = 28;
const COLOR_MAX: u8 = 227;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub width: u32,
    pub height: u32,
}

impl CorpusSpec {
    pub fn new(seed: u64, count: usize, size: u32) -> Self {
        Self {
            seed,
            count,
            width: size,
            height: size,
        }
    }
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self::new(0, 100, 256)
    }
}

/// Generate every image described by `spec`.
pub fn generate_corpus(spec: &CorpusSpec) -> Vec<Image> {
    (0..spec.count).map(|i| generate_image(spec, i)).collect()
}

/// Generate image `index` of the corpus without generating the others.
pub fn generate_image(spec: &CorpusSpec, index: usize) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let (w, h) = (spec.width.max(1), spec.height.max(1));

    let c0 = random_color(&mut rng);
    let c1 = random_color(&mut rng);
    let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let (dx, dy) = (angle.cos(), angle.sin());
    // project the corners to normalise the gradient parameter into [0, 1]
    let corners = [(0.0, 0.0), (w as f64, 0.0), (0.0, h as f64), (w as f64, h as f64)];
    let proj: Vec<f64> = corners.iter().map(|(x, y)| x * dx + y * dy).collect();
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut data = Vec::with_capacity(w as usize * h as usize * 3);
    for y in 0..h {
        for x in 0..w {
            let t = ((x as f64 + 0.5) * dx + (y as f64 + 0.5) * dy - lo) / (hi - lo);
            for c in 0..3 {
                let v = f64::from(c0[c]) * (1.0 - t) + f64::from(c1[c]) * t;
                data.push(v.round() as u8);
            }
        }
    }
    let mut img = Image::new(w, h, data).expect("dimensions are positive");

    let shapes = rng.gen_range(4..=8);
    for _ in 0..shapes {
        let color = random_color(&mut rng);
        let sw = rng.gen_range(0.12..0.6) * w as f64;
        let sh = rng.gen_range(0.12..0.6) * h as f64;
        let cx = rng.gen_range(0.0..w as f64);
        let cy = rng.gen_range(0.0..h as f64);
        let ellipse = rng.gen_bool(0.5);
        paint_shape(&mut img, cx, cy, sw / 2.0, sh / 2.0, ellipse, color);
    }
    img
}

fn random_color(rng: &mut ChaCha8Rng) -> [u8; 3] {
    [
        rng.gen_range(COLOR_MIN..=COLOR_MAX),
        rng.gen_range(COLOR_MIN..=COLOR_MAX),
        rng.gen_range(COLOR_MIN..=COLOR_MAX),
    ]
}

fn paint_shape(img: &mut Image, cx: f64, cy: f64, rx: f64, ry: f64, ellipse: bool, color: [u8; 3]) {
    let (w, h) = img.dimensions();
    let x0 = (cx - rx).floor().max(0.0) as u32;
    let x1 = ((cx + rx).ceil().max(0.0) as u32).min(w);
    let y0 = (cy - ry).floor().max(0.0) as u32;
    let y1 = ((cy + ry).ceil().max(0.0) as u32).min(h);
    for y in y0..y1 {
        for x in x0..x1 {
            let px = (x as f64 + 0.5 - cx) / rx;
            let py = (y as f64 + 0.5 - cy) / ry;
            let inside = if ellipse {
                px * px + py * py <= 1.0
            } else {
                px.abs() <= 1.0 && py.abs() <= 1.0
            };
            if inside {
                img.set_pixel(x, y, color);
            }
        }
    }
}
