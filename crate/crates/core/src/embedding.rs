//! Robust embedding: a 64-bit DCT perceptual hash and its real-valued
//! surrogate.
//!
//! Pipeline: BT.601 grayscale, bilinear resize to 32x32, 2D DCT-II, keep the
//! top-left 8x8 block and drop DC. The 63 remaining coefficients form the
//! [`SurrogateVector`]; thresholding them at their median gives the
//! [`Embedding`] bits. Every stage before the threshold is linear, so the
//! surrogate score has an exact closed-form gradient with respect to pixels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dct::dct_matrix;
use crate::error::{Error, Result};
use crate::image::{FloatImage, Image, CHANNELS, LUMA_WEIGHTS};
use crate::resample::AxisWeights;

/// Side of the square the image is resized to before the DCT.
pub const HASH_RESOLUTION: usize = 32;
/// Side of the low-frequency coefficient block kept from the DCT.
pub const HASH_BLOCK: usize = 8;
/// Number of embedding bits.
pub const EMBEDDING_BITS: usize = HASH_BLOCK * HASH_BLOCK;
/// AC coefficients in the surrogate vector.
pub const SURROGATE_LEN: usize = EMBEDDING_BITS - 1;
pub const DEFAULT_TAU: u32 = 10;

// Coefficients closer than this (in pixel units) count as ties, and
// surrogate norms below it count as zero. Floating-point residue from a
// constant image is many orders of magnitude smaller.
const TIE_EPS: f64 = 1e-6;

/// A 64-bit perceptual hash. Bit 0 is the most significant bit of the
/// wire form and corresponds to the (always zero) DC slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Embedding(u64);

impl Embedding {
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != EMBEDDING_BITS {
            return Err(Error::MessageLength {
                expected: EMBEDDING_BITS,
                actual: bits.len(),
            });
        }
        Ok(Self(
            bits.iter()
                .fold(0u64, |acc, &b| (acc << 1) | u64::from(b)),
        ))
    }

    pub fn from_u64(v: u64) -> Self {
        Self(v)
    }

    pub fn as_u64(&self) -> u64 {
        self.0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < EMBEDDING_BITS);
        (self.0 >> (63 - i)) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..EMBEDDING_BITS).map(|i| self.bit(i)).collect()
    }

    /// Big-endian bytes; this is the message that gets signed.
    pub fn to_bytes(&self) -> [u8; 8] {
        self.0.to_be_bytes()
    }

    pub fn from_bytes(bytes: [u8; 8]) -> Self {
        Self(u64::from_be_bytes(bytes))
    }

    pub fn hamming(&self, other: &Embedding) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    pub fn to_hex(&self) -> String {
        format!("{:016x}", self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 16 {
            return Err(Error::InvalidParameter(format!(
                "embedding hex must be 16 characters, got {}",
                s.len()
            )));
        }
        u64::from_str_radix(s, 16)
            .map(Self)
            .map_err(|e| Error::InvalidParameter(format!("embedding hex: {e}")))
    }
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({})", self.to_hex())
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// The 63 pre-threshold AC coefficients, row-major over the 8x8 block with
/// the DC slot removed.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateVector {
    pub values: [f64; SURROGATE_LEN],
    pub norm: f64,
}

impl SurrogateVector {
    pub fn new(values: [f64; SURROGATE_LEN]) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { values, norm }
    }

    pub fn is_zero(&self) -> bool {
        self.norm < TIE_EPS
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut values = self.values;
        values.iter_mut().for_each(|v| *v *= c);
        Self::new(values)
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    /// Threshold at the median: bit `i + 1` is set iff `values[i]` exceeds
    /// the median. Ties map to 0 and the DC bit is always 0.
    pub fn to_embedding(&self) -> Embedding {
        let mut sorted = self.values;
        sorted.sort_by(f64::total_cmp);
        let median = sorted[SURROGATE_LEN / 2];
        let mut word = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            if v > median + TIE_EPS {
                word |= 1 << (62 - i);
            }
        }
        Embedding(word)
    }
}

/// The l2-normalised dot product. Zero vectors score 0 against anything.
pub fn score(a: &SurrogateVector, b: &SurrogateVector) -> f64 {
    if a.is_zero() || b.is_zero() {
        return 0.0;
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    dot / (a.norm * b.norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareParams {
    /// Largest Hamming distance still considered a match.
    pub tau: u32,
}

impl Default for CompareParams {
    fn default() -> Self {
        Self { tau: DEFAULT_TAU }
    }
}

impl CompareParams {
    pub fn new(tau: u32) -> Result<Self> {
        let p = Self { tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau >= EMBEDDING_BITS as u32 {
            return Err(Error::InvalidParameter(format!(
                "tau must be below {EMBEDDING_BITS}, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Objective direction for [`surrogate_gradient`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Gradient of the score (move to increase similarity).
    Ascent,
    /// Negated gradient (move to decrease similarity).
    Descent,
}

/// The linear map from a `width x height` grayscale plane to the 8x8
/// low-frequency block: `coef = rows * gray * cols^T`.
#[derive(Debug, Clone)]
pub struct HashProjector {
    width: usize,
    height: usize,
    /// `HASH_BLOCK x height`, row-major.
    rows: Vec<f64>,
    /// `HASH_BLOCK x width`, row-major.
    cols: Vec<f64>,
}

impl HashProjector {
    pub fn new(width: u32, height: u32) -> Self {
        let (w, h) = (width as usize, height as usize);
        let dct = dct_matrix(HASH_RESOLUTION);
        let compose = |len: usize| {
            let resize = AxisWeights::new(len, HASH_RESOLUTION);
            let mut out = vec![0.0; HASH_BLOCK * len];
            for u in 0..HASH_BLOCK {
                for (r, taps) in resize.taps.iter().enumerate() {
                    let d = dct[u * HASH_RESOLUTION + r];
                    for &(i, wt) in taps {
                        out[u * len + i] += d * wt;
                    }
                }
            }
            out
        };
        Self {
            width: w,
            height: h,
            rows: compose(h),
            cols: compose(w),
        }
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width as u32, self.height as u32)
    }

    fn check(&self, img: &FloatImage) {
        assert_eq!(
            (img.width as usize, img.height as usize),
            (self.width, self.height),
            "projector built for a different image size"
        );
    }

    /// Full 8x8 low-frequency block including DC.
    pub fn coefficients(&self, img: &FloatImage) -> [[f64; HASH_BLOCK]; HASH_BLOCK] {
        self.check(img);
        let (w, h) = (self.width, self.height);
        // m[i][v] = sum_j gray[i][j] * cols[v][j]
        let mut m = vec![[0.0; HASH_BLOCK]; h];
        for (i, mrow) in m.iter_mut().enumerate() {
            let row = &img.data[i * w * CHANNELS..(i + 1) * w * CHANNELS];
            for (j, px) in row.chunks_exact(CHANNELS).enumerate() {
                let g = LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2];
                for (v, acc) in mrow.iter_mut().enumerate() {
                    *acc += g * self.cols[v * w + j];
                }
            }
        }
        let mut c = [[0.0; HASH_BLOCK]; HASH_BLOCK];
        for (u, crow) in c.iter_mut().enumerate() {
            for (i, mrow) in m.iter().enumerate() {
                let k = self.rows[u * h + i];
                for v in 0..HASH_BLOCK {
                    crow[v] += k * mrow[v];
                }
            }
        }
        c
    }

    pub fn surrogate(&self, img: &FloatImage) -> SurrogateVector {
        let c = self.coefficients(img);
        let mut values = [0.0; SURROGATE_LEN];
        for (k, v) in values.iter_mut().enumerate() {
            let idx = k + 1;
            *v = c[idx / HASH_BLOCK][idx % HASH_BLOCK];
        }
        SurrogateVector::new(values)
    }

    /// Pull a gradient with respect to the 63 surrogate values back to a
    /// per-channel-value gradient (same layout as the image data).
    pub fn pullback(&self, dvalues: &[f64; SURROGATE_LEN]) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut dc = [[0.0; HASH_BLOCK]; HASH_BLOCK];
        for (k, &d) in dvalues.iter().enumerate() {
            let idx = k + 1;
            dc[idx / HASH_BLOCK][idx % HASH_BLOCK] = d;
        }
        // a[i][v] = sum_u rows[u][i] * dc[u][v]
        let mut out = vec![0.0; w * h * CHANNELS];
        let mut t = vec![0.0; w];
        for i in 0..h {
            let mut a = [0.0; HASH_BLOCK];
            for (u, dcrow) in dc.iter().enumerate() {
                let k = self.rows[u * h + i];
                for v in 0..HASH_BLOCK {
                    a[v] += k * dcrow[v];
                }
            }
            for (j, tj) in t.iter_mut().enumerate() {
                *tj = (0..HASH_BLOCK).map(|v| a[v] * self.cols[v * w + j]).sum();
            }
            let row = &mut out[i * w * CHANNELS..(i + 1) * w * CHANNELS];
            for (px, &g) in row.chunks_exact_mut(CHANNELS).zip(&t) {
                px[0] = LUMA_WEIGHTS[0] * g;
                px[1] = LUMA_WEIGHTS[1] * g;
                px[2] = LUMA_WEIGHTS[2] * g;
            }
        }
        out
    }

    /// Exact gradient of `score(surrogate(img), other)` with respect to
    /// every channel value, negated for [`Direction::Descent`].
    pub fn score_gradient(
        &self,
        img: &FloatImage,
        other: &SurrogateVector,
        direction: Direction,
    ) -> Vec<f64> {
        let v = self.surrogate(img);
        if v.is_zero() || other.is_zero() {
            return vec![0.0; img.data.len()];
        }
        let s = score(&v, other);
        let sign = match direction {
            Direction::Ascent => 1.0,
            Direction::Descent => -1.0,
        };
        let mut dv = [0.0; SURROGATE_LEN];
        for (k, d) in dv.iter_mut().enumerate() {
            *d = sign
                * (other.values[k] / (v.norm * other.norm) - s * v.values[k] / (v.norm * v.norm));
        }
        self.pullback(&dv)
    }
}

pub fn ref_surrogate(img: &Image) -> SurrogateVector {
    surrogate_float(&img.to_float())
}

pub fn surrogate_float(img: &FloatImage) -> SurrogateVector {
    HashProjector::new(img.width, img.height).surrogate(img)
}

pub fn ref_embed(img: &Image) -> Embedding {
    ref_surrogate(img).to_embedding()
}

/// `true` iff the Hamming distance is at most `tau`.
pub fn ref_compare(a: &Embedding, b: &Embedding, params: &CompareParams) -> bool {
    a.hamming(b) <= params.tau
}

pub fn surrogate_gradient(img: &FloatImage, direction: Direction, other: &SurrogateVector) -> Vec<f64> {
    HashProjector::new(img.width, img.height).score_gradient(img, other, direction)
}
