//! Robust publicly-detectable watermarking.
//!
//! `watermark` hashes the image with the robust embedding, signs the 8-byte
//! embedding and plants signature and embedding through the QIM channel.
//! `detect` decodes the payload, verifies the signature over the decoded
//! embedding and checks that the decoded embedding is close to the
//! embedding of the image at hand. Detection needs only the public key.
//!
//! Payload layout, MSB-first, zero padded to the channel capacity:
//!
//! ```text
//! [8-bit version = 0x02][512-bit signature][64-bit embedding][32-bit CRC-32]
//! ```
//!
//! The CRC (IEEE polynomial) covers the 584 bits before it.

use serde::{Deserialize, Serialize};

use crate::bits::{bits_to_bytes, bytes_to_bits};
use crate::embedding::{ref_compare, ref_embed, CompareParams, Embedding, EMBEDDING_BITS};
use crate::error::{Error, Result};
use crate::image::{psnr, Image};
use crate::pgws::{Pgws, PgwsMessage};
use crate::sig::{self, PublicKey, SecretKey, Signature, SIGNATURE_BYTES};

pub const RPWS_VERSION: u8 = 0x02;
/// Framed payload length before padding.
pub const PAYLOAD_BITS: usize = 8 + 8 * SIGNATURE_BYTES + EMBEDDING_BITS + 32;
const CRC_COVERED_BYTES: usize = 1 + SIGNATURE_BYTES + 8;

/// Reason strings reported by [`DetectionReport`].
pub mod reason {
    pub const DETECTED: &str = "detected";
    pub const NO_PAYLOAD: &str = "no payload";
    pub const IMAGE_TOO_SMALL: &str = "image too small";
    pub const BAD_SIGNATURE: &str = "signature invalid";
    pub const EMBEDDING_MISMATCH: &str = "embedding mismatch";
    pub const BOTH_FAILED: &str = "signature invalid and embedding mismatch";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RpwsPayload {
    pub signature: Signature,
    pub embedding: Embedding,
}

impl RpwsPayload {
    fn framed_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(CRC_COVERED_BYTES + 4);
        bytes.push(RPWS_VERSION);
        bytes.extend_from_slice(&self.signature.to_bytes());
        bytes.extend_from_slice(&self.embedding.to_bytes());
        let crc = crc32fast::hash(&bytes);
        bytes.extend_from_slice(&crc.to_be_bytes());
        bytes
    }

    /// Frame and zero-pad to `capacity` bits.
    pub fn to_message(&self, capacity: usize) -> Result<PgwsMessage> {
        let mut bits = bytes_to_bits(&self.framed_bytes());
        if bits.len() > capacity {
            return Err(Error::InfeasibleCapacity(format!(
                "payload needs {PAYLOAD_BITS} bits, channel carries {capacity}"
            )));
        }
        bits.resize(capacity, false);
        PgwsMessage::new(bits, capacity)
    }

    /// Parse a decoded message; `None` if the version or CRC do not match.
    /// Padding bits are ignored.
    pub fn from_message(message: &PgwsMessage) -> Option<Self> {
        let bits = message.bits();
        if bits.len() < PAYLOAD_BITS {
            return None;
        }
        let bytes = bits_to_bytes(&bits[..PAYLOAD_BITS]);
        let (covered, crc) = bytes.split_at(CRC_COVERED_BYTES);
        if covered[0] != RPWS_VERSION
            || crc32fast::hash(covered).to_be_bytes() != crc[..4]
        {
            return None;
        }
        let mut sig = [0u8; SIGNATURE_BYTES];
        sig.copy_from_slice(&covered[1..1 + SIGNATURE_BYTES]);
        let mut emb = [0u8; 8];
        emb.copy_from_slice(&covered[1 + SIGNATURE_BYTES..]);
        Some(Self {
            signature: Signature::from_bytes(sig),
            embedding: Embedding::from_bytes(emb),
        })
    }
}

/// Outcome of [`Rpws::detect`]. `overall` is the detector's verdict; the
/// other fields explain it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub overall: bool,
    pub sig_ok: bool,
    pub embed_ok: bool,
    /// Distance between the decoded embedding and the image's embedding,
    /// when a payload was found.
    pub hamming: Option<u32>,
    pub reason: String,
}

impl DetectionReport {
    fn failed(reason: &str) -> Self {
        Self {
            overall: false,
            sig_ok: false,
            embed_ok: false,
            hamming: None,
            reason: reason.into(),
        }
    }

    /// One-line JSON form.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report always serialises")
    }
}

/// The scheme instance: channel and comparison parameters are public and
/// shared by signer and detector.
#[derive(Debug, Clone, Default)]
pub struct Rpws {
    pgws: Pgws,
    compare: CompareParams,
}

/// Keys for the scheme are plain signature keys.
pub fn rpws_generate(security: u32) -> Result<(SecretKey, PublicKey)> {
    sig::generate(security)
}

impl Rpws {
    pub fn new(pgws: Pgws, compare: CompareParams) -> Result<Self> {
        compare.validate()?;
        if pgws.capacity() < PAYLOAD_BITS {
            return Err(Error::InfeasibleCapacity(format!(
                "framed payload needs {PAYLOAD_BITS} bits, channel carries {}",
                pgws.capacity()
            )));
        }
        Ok(Self { pgws, compare })
    }

    pub fn pgws(&self) -> &Pgws {
        &self.pgws
    }

    pub fn compare_params(&self) -> &CompareParams {
        &self.compare
    }

    pub fn payload_for(&self, sk: &SecretKey, img: &Image) -> Result<RpwsPayload> {
        let embedding = ref_embed(img);
        let signature = sig::sign(sk, &embedding.to_bytes())?;
        Ok(RpwsPayload {
            signature,
            embedding,
        })
    }

    pub fn watermark(&self, sk: &SecretKey, img: &Image) -> Result<Image> {
        let payload = self.payload_for(sk, img)?;
        self.embed_payload(img, &payload)
    }

    /// Plant an arbitrary payload. Used by [`Rpws::watermark`] and by tests
    /// that replay a payload into other content.
    pub fn embed_payload(&self, img: &Image, payload: &RpwsPayload) -> Result<Image> {
        let message = payload.to_message(self.pgws.capacity())?;
        self.pgws.encode(img, &message)
    }

    /// Watermark and report the PSNR of the result.
    pub fn watermark_with_psnr(&self, sk: &SecretKey, img: &Image) -> Result<(Image, f64)> {
        let out = self.watermark(sk, img)?;
        let p = psnr(img, &out)?;
        Ok((out, p))
    }

    /// Decode the framed payload, if one is present.
    pub fn extract_payload(&self, img: &Image) -> Option<RpwsPayload> {
        self.pgws
            .decode(img)
            .ok()
            .and_then(|m| RpwsPayload::from_message(&m))
    }

    pub fn detect(&self, pk: &PublicKey, img: &Image) -> DetectionReport {
        let message = match self.pgws.decode(img) {
            Ok(m) => m,
            Err(_) => return DetectionReport::failed(reason::IMAGE_TOO_SMALL),
        };
        let Some(payload) = RpwsPayload::from_message(&message) else {
            return DetectionReport::failed(reason::NO_PAYLOAD);
        };
        let sig_ok = sig::verify(pk, &payload.embedding.to_bytes(), &payload.signature);
        let current = ref_embed(img);
        let embed_ok = ref_compare(&current, &payload.embedding, &self.compare);
        let reason = match (sig_ok, embed_ok) {
            (true, true) => reason::DETECTED,
            (false, true) => reason::BAD_SIGNATURE,
            (true, false) => reason::EMBEDDING_MISMATCH,
            (false, false) => reason::BOTH_FAILED,
        };
        DetectionReport {
            overall: sig_ok && embed_ok,
            sig_ok,
            embed_ok,
            hamming: Some(current.hamming(&payload.embedding)),
            reason: reason.into(),
        }
    }
}
