//! Post-hoc watermark channel: block-DCT quantisation index modulation.
//!
//! The luma plane is split into 8x8 blocks. Each block offers a fixed set of
//! mid-frequency carrier coefficients; the carrier slots of the whole image
//! are shuffled with a public seed and the first `capacity * repetition`
//! slots carry the message, each bit replicated `repetition` times. A bit is
//! written by moving its coefficient to the nearest point of the even
//! (bit 0) or odd (bit 1) multiples of `qim_step / 2`. Decoding takes a
//! majority vote over the replicas.
//!
//! Luma changes are applied equally to R, G and B, which leaves both colour
//! difference channels untouched.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dct::Dct8;
use crate::embedding::EMBEDDING_BITS;
use crate::error::{Error, Result};
use crate::image::{clamp_u8, luma, Image};
use crate::sig::{SECURITY_BITS, SIGNATURE_BITS};
use crate::transforms::{TransformSet, TransformSpec};

pub const BLOCK_SIZE: usize = 8;
/// Smallest capacity able to carry a signature and an embedding.
pub const MIN_CAPACITY: usize = SIGNATURE_BITS + EMBEDDING_BITS;

// Encoding re-measures the rounded image and corrects drifted carriers.
const REFINE_PASSES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PgwsParams {
    /// Message length in bits.
    pub capacity: usize,
    pub block_size: usize,
    /// QIM lattice step in luma DCT units.
    pub qim_step: f64,
    /// Odd number of replicas per message bit.
    pub repetition: usize,
    /// `(u, v)` coefficient indices used in each block, u vertical.
    pub carriers: Vec<[u8; 2]>,
    /// Public seed of the carrier-slot permutation.
    pub prng_seed: u64,
    /// Smallest image the parameters must fit.
    pub min_width: u32,
    pub min_height: u32,
}

impl Default for PgwsParams {
    fn default() -> Self {
        Self {
            capacity: 1024,
            block_size: BLOCK_SIZE,
            qim_step: 20.0,
            repetition: 3,
            carriers: vec![[2, 1], [1, 2], [3, 1], [1, 3]],
            prng_seed: 0x5047_5753,
            min_width: 256,
            min_height: 256,
        }
    }
}

impl PgwsParams {
    fn slots_for(&self, width: u32, height: u32) -> usize {
        (width as usize / BLOCK_SIZE) * (height as usize / BLOCK_SIZE) * self.carriers.len()
    }

    pub fn required_slots(&self) -> usize {
        self.capacity * self.repetition
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.block_size != BLOCK_SIZE {
            return bad(format!("block_size must be {BLOCK_SIZE}"));
        }
        if !(self.qim_step.is_finite() && self.qim_step > 0.0) {
            return bad(format!("qim_step must be positive, got {}", self.qim_step));
        }
        if self.repetition.is_multiple_of(2) {
            return bad(format!("repetition must be odd, got {}", self.repetition));
        }
        if self.carriers.is_empty() {
            return bad("at least one carrier coefficient is required".into());
        }
        for (i, c) in self.carriers.iter().enumerate() {
            if c[0] as usize >= BLOCK_SIZE || c[1] as usize >= BLOCK_SIZE || *c == [0, 0] {
                return bad(format!("carrier {c:?} must be an AC index inside the block"));
            }
            if self.carriers[..i].contains(c) {
                return bad(format!("duplicate carrier {c:?}"));
            }
        }
        if self.capacity < MIN_CAPACITY {
            return Err(Error::InfeasibleCapacity(format!(
                "capacity {} below signature + embedding length {MIN_CAPACITY}",
                self.capacity
            )));
        }
        let available = self.slots_for(self.min_width, self.min_height);
        if self.required_slots() > available {
            return Err(Error::InfeasibleCapacity(format!(
                "{} bits x {} replicas = {} slots, but a {}x{} image offers {available}",
                self.capacity,
                self.repetition,
                self.required_slots(),
                self.min_width,
                self.min_height
            )));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("params always serialise")
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let p: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

/// A `capacity`-bit message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PgwsMessage(Vec<bool>);

impl PgwsMessage {
    pub fn new(bits: Vec<bool>, capacity: usize) -> Result<Self> {
        if bits.len() != capacity {
            return Err(Error::MessageLength {
                expected: capacity,
                actual: bits.len(),
            });
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Nearest point of the bit's lattice: even (bit 0) or odd (bit 1)
/// multiples of `step / 2`.
pub fn qim_quantize(value: f64, step: f64, bit: bool) -> f64 {
    let offset = if bit { step / 2.0 } else { 0.0 };
    ((value - offset) / step).round() * step + offset
}

/// The bit whose lattice lies nearest to `value`.
pub fn qim_decide(value: f64, step: f64) -> bool {
    ((value / (step / 2.0)).round() as i64).rem_euclid(2) == 1
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    bx: usize,
    by: usize,
    u: usize,
    v: usize,
}

/// An instantiated channel: the shared parameters plus the declared set of
/// transformations it is meant to survive.
#[derive(Debug, Clone)]
pub struct Pgws {
    params: PgwsParams,
    declared: TransformSet,
}

/// Build encoder/decoder handles after checking that `params` fit.
pub fn pgws_generate(security: u32, params: PgwsParams) -> Result<Pgws> {
    if security != SECURITY_BITS {
        return Err(Error::UnsupportedSecurity(security));
    }
    Pgws::new(params)
}

impl Default for Pgws {
    fn default() -> Self {
        Self::new(PgwsParams::default()).expect("default parameters are feasible")
    }
}

impl Pgws {
    pub fn new(params: PgwsParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            declared: TransformSet::PGWS,
        })
    }

    pub fn params(&self) -> &PgwsParams {
        &self.params
    }

    pub fn capacity(&self) -> usize {
        self.params.capacity
    }

    pub fn declared_transforms(&self) -> &TransformSet {
        &self.declared
    }

    pub fn declares(&self, t: &TransformSpec) -> bool {
        self.declared.contains(t)
    }

    fn check_size(&self, img: &Image) -> Result<()> {
        let (w, h) = img.dimensions();
        if w < self.params.min_width || h < self.params.min_height {
            return Err(Error::ImageTooSmall(format!(
                "{w}x{h}, the channel needs at least {}x{}",
                self.params.min_width, self.params.min_height
            )));
        }
        Ok(())
    }

    /// The permuted carrier slots in use for an image of this size. Slot `j`
    /// carries message bit `j % capacity`.
    fn slots(&self, width: u32, height: u32) -> Vec<Slot> {
        let bw = width as usize / BLOCK_SIZE;
        let bh = height as usize / BLOCK_SIZE;
        let nc = self.params.carriers.len();
        let mut order: Vec<usize> = (0..bw * bh * nc).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.prng_seed);
        order.shuffle(&mut rng);
        order.truncate(self.params.required_slots());
        order
            .into_iter()
            .map(|s| {
                let block = s / nc;
                let [u, v] = self.params.carriers[s % nc];
                Slot {
                    bx: block % bw,
                    by: block / bw,
                    u: u as usize,
                    v: v as usize,
                }
            })
            .collect()
    }

    pub fn encode(&self, img: &Image, message: &PgwsMessage) -> Result<Image> {
        self.check_size(img)?;
        if message.len() != self.params.capacity {
            return Err(Error::MessageLength {
                expected: self.params.capacity,
                actual: message.len(),
            });
        }
        let (w, h) = (img.width() as usize, img.height() as usize);
        let slots = self.slots(img.width(), img.height());
        let dct = Dct8::get();
        let step = self.params.qim_step;
        let bits = message.bits();

        let mut out = img.clone();
        let mut targets: Vec<Option<f64>> = vec![None; slots.len()];
        for _ in 0..REFINE_PASSES {
            let y_plane = luma_plane(&out);
            let mut delta = vec![0.0; w * h];
            let mut changed = false;
            for (j, slot) in slots.iter().enumerate() {
                let current = coefficient(&y_plane, w, slot);
                let target = *targets[j]
                    .get_or_insert_with(|| qim_quantize(current, step, bits[j % bits.len()]));
                let d = target - current;
                if d.abs() < 0.25 {
                    continue;
                }
                changed = true;
                let pattern = dct.basis_pattern(slot.u, slot.v);
                for (y, prow) in pattern.iter().enumerate() {
                    let row = (slot.by * BLOCK_SIZE + y) * w + slot.bx * BLOCK_SIZE;
                    for (x, p) in prow.iter().enumerate() {
                        delta[row + x] += d * p;
                    }
                }
            }
            if !changed {
                break;
            }
            let base = out.clone();
            for ((dst, src), d) in out
                .as_bytes_mut()
                .chunks_exact_mut(3)
                .zip(base.as_bytes().chunks_exact(3))
                .zip(&delta)
            {
                for c in 0..3 {
                    dst[c] = clamp_u8(f64::from(src[c]) + d);
                }
            }
        }
        Ok(out)
    }

    /// Majority-decode the `capacity` bits. Always returns a message; on an
    /// unwatermarked image the bits are arbitrary.
    pub fn decode(&self, img: &Image) -> Result<PgwsMessage> {
        self.check_size(img)?;
        let w = img.width() as usize;
        let y_plane = luma_plane(img);
        let c = self.params.capacity;
        let mut votes = vec![0usize; c];
        for (j, slot) in self.slots(img.width(), img.height()).iter().enumerate() {
            if qim_decide(coefficient(&y_plane, w, slot), self.params.qim_step) {
                votes[j % c] += 1;
            }
        }
        let half = self.params.repetition / 2;
        Ok(PgwsMessage(votes.into_iter().map(|v| v > half).collect()))
    }
}

fn luma_plane(img: &Image) -> Vec<f64> {
    img.as_bytes()
        .chunks_exact(3)
        .map(|p| luma(f64::from(p[0]), f64::from(p[1]), f64::from(p[2])))
        .collect()
}

fn coefficient(y_plane: &[f64], w: usize, slot: &Slot) -> f64 {
    let pattern = Dct8::get().basis_pattern(slot.u, slot.v);
    let mut acc = 0.0;
    for (y, prow) in pattern.iter().enumerate() {
        let row = (slot.by * BLOCK_SIZE + y) * w + slot.bx * BLOCK_SIZE;
        for (x, p) in prow.iter().enumerate() {
            acc += p * y_plane[row + x];
        }
    }
    acc
}
