//! Publicly-detectable image watermarking.
//!
//! Two schemes share one signature primitive:
//!
//! * [`lsb`]: a fragile watermark that signs a hash of the image's high bits
//!   and stores the signature in the least significant bits.
//! * [`rpws`]: a robust watermark that signs a perceptual hash
//!   ([`embedding`]) and carries signature and hash through a QIM channel
//!   ([`pgws`]) that survives mild compression and noise.
//!
//! [`eval`] measures the robustness of both components and attacks the
//! perceptual hash with projected gradient descent.

#![allow(clippy::needless_range_loop)]

pub mod bits;
pub mod corpus;
pub mod dct;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod image;
pub mod lsb;
pub mod pgws;
pub mod resample;
pub mod rpws;
pub mod sig;
pub mod transforms;

pub use corpus::{generate_corpus, generate_image, CorpusSpec};
pub use embedding::{
    ref_compare, ref_embed, ref_surrogate, score, surrogate_float, surrogate_gradient, CompareParams, Direction,
    Embedding, HashProjector, SurrogateVector,
};
pub use error::{Error, Result};
pub use image::{load_png, psnr, save_png, FloatImage, Image};
pub use lsb::{high_bit_hash, lsb_detect, lsb_watermark};
pub use pgws::{pgws_generate, Pgws, PgwsMessage, PgwsParams};
pub use rpws::{rpws_generate, DetectionReport, Rpws, RpwsPayload};
pub use sig::{PublicKey, SecretKey, Signature};
pub use transforms::{apply, standard_suite, TransformSet, TransformSpec};
