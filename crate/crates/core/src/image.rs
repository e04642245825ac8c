//! RGB images, lossless PNG I/O and pixel metrics.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};

/// Number of channels per pixel. Images are always RGB.
pub const CHANNELS: usize = 3;

/// An 8-bit RGB image stored row-major, channels interleaved.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * CHANNELS;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "expected {expected} channel values for {width}x{height}, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// An image with every pixel set to `rgb`.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "dimensions must be positive");
        let data = rgb
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * CHANNELS)
            .collect();
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    /// Total number of channel values, `width * height * 3`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn as_bytes_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = self.index(x, y);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = self.index(x, y);
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    fn index(&self, x: u32, y: u32) -> usize {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        (y as usize * self.width as usize + x as usize) * CHANNELS
    }

    pub fn to_float(&self) -> FloatImage {
        FloatImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f64::from(v)).collect(),
        }
    }

    fn check_same_dims(&self, other: &Image) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// A real-valued RGB image with the same layout as [`Image`].
///
/// Used wherever pixels are treated as continuous variables: gradient
/// computation, adversarial optimisation and resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl FloatImage {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width as usize * height as usize * CHANNELS
        {
            return Err(Error::InvalidImage(format!(
                "float image {width}x{height} with {} values",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Round to the nearest integer and clamp into `[0, 255]`.
    pub fn to_image(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| clamp_u8(v)).collect(),
        }
    }
}

#[inline]
pub(crate) fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Decode an 8-bit RGB or RGBA PNG. Alpha is dropped; palette images are
/// expanded. No gamma or colour-management transforms are applied.
pub fn load_png(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info()?;
    let info = reader.info();
    if info.bit_depth == png::BitDepth::Sixteen {
        return Err(Error::UnsupportedFormat(format!(
            "{}: 16-bit PNG is not supported",
            path.display()
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::UnsupportedFormat("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf)?;
    if frame.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "{}: bit depth {:?}",
            path.display(),
            frame.bit_depth
        )));
    }
    let (w, h) = (frame.width, frame.height);
    let stride = frame.line_size;
    let per_pixel = match frame.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "{}: colour type {other:?} (need RGB or RGBA)",
                path.display()
            )))
        }
    };
    let mut data = Vec::with_capacity(w as usize * h as usize * CHANNELS);
    for row in buf.chunks(stride).take(h as usize) {
        for px in row[..w as usize * per_pixel].chunks_exact(per_pixel) {
            data.extend_from_slice(&px[..3]);
        }
    }
    Image::new(w, h, data)
}

/// Encode `img` as an 8-bit RGB PNG.
pub fn save_png(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width, img.height);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&img.data)?;
    writer.finish()?;
    Ok(())
}

/// Mean squared error over all channel values.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    a.check_same_dims(b)?;
    let sum: u64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.data.len() as f64)
}

/// Peak signal-to-noise ratio in dB. Identical images give `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Largest absolute per-channel difference.
pub fn max_abs_diff(a: &Image, b: &Image) -> Result<u8> {
    a.check_same_dims(b)?;
    Ok(a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| x.abs_diff(y))
        .max()
        .unwrap_or(0))
}

/// Luma with BT.601 weights.
#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];
