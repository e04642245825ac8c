//! Fragile, unforgeable, publicly-detectable watermark.
//!
//! The image is hashed over its high bits (every channel value divided by
//! two), the hash is signed, and the signature is written into the least
//! significant bits. Overwriting LSBs cannot change the hash, so the
//! detector recomputes exactly the message that was signed.
//!
//! LSB plane layout in raster order: 8-bit version (`0x01`), 512 signature
//! bits, then zeros for every remaining channel value.

use crate::bits::bytes_to_bits;
use crate::error::{Error, Result};
use crate::image::Image;
use crate::sig::{self, PublicKey, SecretKey, Signature, SIGNATURE_BITS};

pub const LSB_VERSION: u8 = 0x01;
/// Version byte plus signature.
pub const LSB_PAYLOAD_BITS: usize = 8 + SIGNATURE_BITS;

/// Concatenate `value / 2` for every channel value as 7-bit big-endian
/// fields, packed with no padding between values.
pub fn high_bit_hash(img: &Image) -> Vec<u8> {
    let values = img.as_bytes();
    let mut out = Vec::with_capacity((values.len() * 7).div_ceil(8));
    let mut acc: u32 = 0;
    let mut nbits = 0u32;
    for &v in values {
        acc = (acc << 7) | u32::from(v >> 1);
        nbits += 7;
        while nbits >= 8 {
            nbits -= 8;
            out.push((acc >> nbits) as u8);
        }
        acc &= (1 << nbits) - 1;
    }
    if nbits > 0 {
        out.push((acc << (8 - nbits)) as u8);
    }
    out
}

pub fn lsb_watermark(sk: &SecretKey, img: &Image) -> Result<Image> {
    if img.len() < LSB_PAYLOAD_BITS {
        return Err(Error::ImageTooSmall(format!(
            "{} channel values, need at least {LSB_PAYLOAD_BITS}",
            img.len()
        )));
    }
    let sigma = sig::sign(sk, &high_bit_hash(img))?;
    let mut payload = bytes_to_bits(&[LSB_VERSION]);
    payload.extend(sigma.to_bits());

    let mut out = img.clone();
    for (i, v) in out.as_bytes_mut().iter_mut().enumerate() {
        let bit = payload.get(i).copied().unwrap_or(false);
        *v = (*v & !1) | u8::from(bit);
    }
    Ok(out)
}

/// Public detector. Any malformed input simply fails detection.
pub fn lsb_detect(pk: &PublicKey, img: &Image) -> bool {
    if img.len() < LSB_PAYLOAD_BITS {
        return false;
    }
    let lsbs: Vec<bool> = img.as_bytes()[..LSB_PAYLOAD_BITS]
        .iter()
        .map(|v| v & 1 == 1)
        .collect();
    if lsbs[..8] != bytes_to_bits(&[LSB_VERSION])[..] {
        return false;
    }
    let Ok(sigma) = Signature::from_bits(&lsbs[8..]) else {
        return false;
    };
    sig::verify(pk, &high_bit_hash(img), &sigma)
}
