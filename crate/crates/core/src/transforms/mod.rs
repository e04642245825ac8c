//! Parameterised, deterministic image transformations.

pub mod jpeg;

pub use jpeg::{chroma_table, jpeg_roundtrip, luma_table};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{clamp_u8, Image};
use crate::resample::resize;

/// Ten percent of the full channel range.
pub const BRIGHTNESS_10PCT: f64 = 25.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSpec {
    Identity,
    Jpeg { quality: u8 },
    GaussianNoise { sigma: f64, seed: u64 },
    /// Resize by `scale`, then back to the original dimensions.
    Resize { scale: f64 },
    /// Keep the central `keep_fraction` of each axis, then resize back.
    CenterCrop { keep_fraction: f64 },
    /// Add `delta` to every channel value.
    Brightness { delta: f64 },
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            TransformSpec::Identity => Ok(()),
            TransformSpec::Jpeg { quality } if !(1..=100).contains(&quality) => {
                bad(format!("jpeg quality {quality} outside [1, 100]"))
            }
            TransformSpec::GaussianNoise { sigma, .. } if !(sigma.is_finite() && sigma >= 0.0) => {
                bad(format!("noise sigma {sigma} must be non-negative"))
            }
            TransformSpec::Resize { scale } if !(scale > 0.0 && scale <= 4.0) => {
                bad(format!("resize scale {scale} outside (0, 4]"))
            }
            TransformSpec::CenterCrop { keep_fraction }
                if !(keep_fraction > 0.0 && keep_fraction <= 1.0) =>
            {
                bad(format!("crop keep_fraction {keep_fraction} outside (0, 1]"))
            }
            TransformSpec::Brightness { delta } if !(-64.0..=64.0).contains(&delta) => {
                bad(format!("brightness delta {delta} outside [-64, 64]"))
            }
            _ => Ok(()),
        }
    }

    /// Short stable name, used in reports and corpus file names.
    pub fn label(&self) -> String {
        match *self {
            TransformSpec::Identity => "identity".into(),
            TransformSpec::Jpeg { quality } => format!("jpeg_q{quality}"),
            TransformSpec::GaussianNoise { sigma, .. } => format!("noise_s{sigma}"),
            TransformSpec::Resize { scale } => format!("resize_{scale}"),
            TransformSpec::CenterCrop { keep_fraction } => format!("crop_{keep_fraction}"),
            TransformSpec::Brightness { delta } => format!("brightness_{delta:+}"),
        }
    }

    /// Member of the transform set the perceptual hash is designed to
    /// tolerate.
    pub fn in_ref_set(&self) -> bool {
        TransformSet::REF.contains(self)
    }

    /// Member of the transform set the QIM channel is designed to survive.
    pub fn in_pgws_set(&self) -> bool {
        TransformSet::PGWS.contains(self)
    }

    /// In both sets: detection of the full scheme is expected to survive.
    pub fn in_common_set(&self) -> bool {
        self.in_ref_set() && self.in_pgws_set()
    }
}

/// A declared family of tolerated transformations, described by parameter
/// bounds. `None` means the kind is not in the family at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSet {
    pub jpeg_min_quality: Option<u8>,
    pub noise_max_sigma: Option<f64>,
    pub resize_scale_range: Option<(f64, f64)>,
    pub crop_min_keep: Option<f64>,
    pub brightness_max_delta: Option<f64>,
}

impl TransformSet {
    /// JPEG q>=85, noise sigma<=2, resize +-25%, brightness +-10%.
    pub const REF: TransformSet = TransformSet {
        jpeg_min_quality: Some(85),
        noise_max_sigma: Some(2.0),
        resize_scale_range: Some((0.75, 1.25)),
        crop_min_keep: None,
        brightness_max_delta: Some(BRIGHTNESS_10PCT),
    };

    /// JPEG q>=85, noise sigma<=2, brightness +-10%.
    pub const PGWS: TransformSet = TransformSet {
        jpeg_min_quality: Some(85),
        noise_max_sigma: Some(2.0),
        resize_scale_range: None,
        crop_min_keep: None,
        brightness_max_delta: Some(BRIGHTNESS_10PCT),
    };

    pub fn contains(&self, t: &TransformSpec) -> bool {
        match *t {
            TransformSpec::Identity => true,
            TransformSpec::Jpeg { quality } => self.jpeg_min_quality.is_some_and(|q| quality >= q),
            TransformSpec::GaussianNoise { sigma, .. } => {
                self.noise_max_sigma.is_some_and(|s| sigma <= s)
            }
            TransformSpec::Resize { scale } => self
                .resize_scale_range
                .is_some_and(|(lo, hi)| (lo..=hi).contains(&scale)),
            TransformSpec::CenterCrop { keep_fraction } => {
                self.crop_min_keep.is_some_and(|k| keep_fraction >= k)
            }
            TransformSpec::Brightness { delta } => {
                self.brightness_max_delta.is_some_and(|d| delta.abs() <= d)
            }
        }
    }
}

/// Apply `spec`. The output always has the input's dimensions.
pub fn apply(spec: &TransformSpec, img: &Image) -> Result<Image> {
    spec.validate()?;
    let (w, h) = img.dimensions();
    Ok(match *spec {
        TransformSpec::Identity => img.clone(),
        TransformSpec::Jpeg { quality } => jpeg_roundtrip(img, quality),
        TransformSpec::GaussianNoise { sigma, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let normal = Normal::new(0.0, sigma).expect("sigma validated");
            let data = img
                .as_bytes()
                .iter()
                .map(|&v| clamp_u8(f64::from(v) + normal.sample(&mut rng)))
                .collect();
            Image::new(w, h, data)?
        }
        TransformSpec::Resize { scale } => {
            let nw = ((w as f64 * scale).round() as u32).max(1);
            let nh = ((h as f64 * scale).round() as u32).max(1);
            resize(&resize(img, nw, nh), w, h)
        }
        TransformSpec::CenterCrop { keep_fraction } => {
            let cw = ((w as f64 * keep_fraction).round() as u32).clamp(1, w);
            let ch = ((h as f64 * keep_fraction).round() as u32).clamp(1, h);
            let (ox, oy) = ((w - cw) / 2, (h - ch) / 2);
            let mut data = Vec::with_capacity(cw as usize * ch as usize * 3);
            for y in oy..oy + ch {
                for x in ox..ox + cw {
                    data.extend_from_slice(&img.pixel(x, y));
                }
            }
            resize(&Image::new(cw, ch, data)?, w, h)
        }
        TransformSpec::Brightness { delta } => {
            let data = img
                .as_bytes()
                .iter()
                .map(|&v| clamp_u8(f64::from(v) + delta))
                .collect();
            Image::new(w, h, data)?
        }
    })
}

/// The fixed transform suite used for robustness and ROC reporting.
pub fn standard_suite() -> Vec<TransformSpec> {
    vec![
        TransformSpec::Identity,
        TransformSpec::Jpeg { quality: 95 },
        TransformSpec::Jpeg { quality: 90 },
        TransformSpec::Jpeg { quality: 85 },
        TransformSpec::GaussianNoise { sigma: 1.0, seed: 0x6e01 },
        TransformSpec::GaussianNoise { sigma: 2.0, seed: 0x6e02 },
        TransformSpec::Resize { scale: 0.75 },
        TransformSpec::Resize { scale: 1.25 },
        TransformSpec::CenterCrop { keep_fraction: 0.9 },
        TransformSpec::Brightness { delta: BRIGHTNESS_10PCT },
        TransformSpec::Brightness { delta: -BRIGHTNESS_10PCT },
    ]
}

/// Wrapper so a list of transforms serialises as a TOML array of tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSuite {
    pub transform: Vec<TransformSpec>,
}

impl TransformSuite {
    pub fn standard() -> Self {
        Self {
            transform: standard_suite(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("transform specs always serialise")
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let suite: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        for t in &suite.transform {
            t.validate()?;
        }
        Ok(suite)
    }
}
