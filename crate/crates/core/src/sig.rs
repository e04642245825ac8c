//! Fixed-length digital signatures.
//!
//! Deterministic Schnorr signatures over Curve25519 (Ed25519): 256-bit keys
//! and 512-bit signatures. Signing the same message with the same key always
//! yields the same signature, so watermarking is reproducible.

use std::fmt;

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{bits_to_bytes, bytes_to_bits};
use crate::error::{Error, Result};

/// The only supported security level, in bits.
pub const SECURITY_BITS: u32 = 128;
/// Signature length in bits.
pub const SIGNATURE_BITS: usize = 512;
pub const SIGNATURE_BYTES: usize = SIGNATURE_BITS / 8;
pub const KEY_BYTES: usize = 32;
/// Largest message accepted by [`sign`].
pub const MAX_MESSAGE_LEN: u64 = 1 << 32;

/// Signing key. Only ever leaves the process through [`SecretKey::to_hex`].
#[derive(Clone)]
pub struct SecretKey(SigningKey);

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PublicKey(VerifyingKey);

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature([u8; SIGNATURE_BYTES]);

impl SecretKey {
    pub fn from_bytes(seed: [u8; KEY_BYTES]) -> Self {
        Self(SigningKey::from_bytes(&seed))
    }

    /// Deterministic key for reproducible evaluation runs. Not for
    /// publishing content.
    pub fn from_seed(seed: u64) -> Self {
        let mut bytes = [0u8; KEY_BYTES];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
        Self::from_bytes(bytes)
    }

    pub fn to_bytes(&self) -> [u8; KEY_BYTES] {
        self.0.to_bytes()
    }

    pub fn public_key(&self) -> PublicKey {
        PublicKey(self.0.verifying_key())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        Ok(Self::from_bytes(decode_hex32(s)?))
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

impl PublicKey {
    pub fn from_bytes(bytes: [u8; KEY_BYTES]) -> Result<Self> {
        VerifyingKey::from_bytes(&bytes)
            .map(Self)
            .map_err(|e| Error::InvalidKey(e.to_string()))
    }

    pub fn to_bytes(&self) -> [u8; KEY_BYTES] {
        self.0.to_bytes()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        Self::from_bytes(decode_hex32(s)?)
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", self.to_hex())
    }
}

impl Signature {
    pub fn from_bytes(bytes: [u8; SIGNATURE_BYTES]) -> Self {
        Self(bytes)
    }

    pub fn to_bytes(&self) -> [u8; SIGNATURE_BYTES] {
        self.0
    }

    /// The 512 signature bits, MSB-first.
    pub fn to_bits(&self) -> Vec<bool> {
        bytes_to_bits(&self.0)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.len() != SIGNATURE_BITS {
            return Err(Error::MessageLength {
                expected: SIGNATURE_BITS,
                actual: bits.len(),
            });
        }
        let mut out = [0u8; SIGNATURE_BYTES];
        out.copy_from_slice(&bits_to_bytes(bits));
        Ok(Self(out))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let mut out = [0u8; SIGNATURE_BYTES];
        hex::decode_to_slice(s.trim(), &mut out)
            .map_err(|e| Error::InvalidKey(format!("signature hex: {e}")))?;
        Ok(Self(out))
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", self.to_hex())
    }
}

fn decode_hex32(s: &str) -> Result<[u8; KEY_BYTES]> {
    let mut out = [0u8; KEY_BYTES];
    hex::decode_to_slice(s.trim(), &mut out)
        .map_err(|e| Error::InvalidKey(format!("expected 64 hex characters: {e}")))?;
    Ok(out)
}

/// Generate a fresh keypair from the operating system's CSPRNG.
pub fn generate(security: u32) -> Result<(SecretKey, PublicKey)> {
    if security != SECURITY_BITS {
        return Err(Error::UnsupportedSecurity(security));
    }
    let mut seed = [0u8; KEY_BYTES];
    OsRng.fill_bytes(&mut seed);
    let sk = SecretKey::from_bytes(seed);
    let pk = sk.public_key();
    Ok((sk, pk))
}

pub fn sign(sk: &SecretKey, message: &[u8]) -> Result<Signature> {
    if message.len() as u64 > MAX_MESSAGE_LEN {
        return Err(Error::MessageTooLong(message.len()));
    }
    Ok(Signature(sk.0.sign(message).to_bytes()))
}

/// `true` iff `sig` is a valid signature by `pk` over exactly `message`.
/// Malformed signatures verify as `false`.
pub fn verify(pk: &PublicKey, message: &[u8], sig: &Signature) -> bool {
    let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
    pk.0.verify_strict(message, &sig).is_ok()
}
