//! Per-transform robustness of the hash, the channel and the full scheme.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::{ref_compare, ref_embed};
use crate::error::{Error, Result};
use crate::eval::report::write_csv;
use crate::image::{psnr, Image};
use crate::rpws::Rpws;
use crate::sig::SecretKey;
use crate::transforms::{apply, TransformSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub transform: String,
    pub in_ref_set: bool,
    pub in_pgws_set: bool,
    pub n: usize,
    /// Fraction of images whose hash no longer matches after the transform.
    pub eps_ref: f64,
    /// Fraction of watermarked images whose message does not decode exactly.
    pub eps_pgws: f64,
    /// Fraction of watermarked images still detected after the transform.
    pub detection_rate: f64,
}

impl RobustnessRow {
    pub fn detection_failure(&self) -> f64 {
        1.0 - self.detection_rate
    }

    /// `detection failure <= eps_ref + eps_pgws + slack`.
    pub fn within_budget(&self, slack: f64) -> bool {
        self.detection_failure() <= self.eps_ref + self.eps_pgws + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub rows: Vec<RobustnessRow>,
    /// Fraction of images whose hash survives watermarking itself.
    pub composition_rate: f64,
    pub min_psnr: f64,
}

pub const ROBUSTNESS_HEADER: [&str; 7] = [
    "transform",
    "in_ref_set",
    "in_pgws_set",
    "n",
    "eps_ref",
    "eps_pgws",
    "detection_rate",
];

impl RobustnessReport {
    /// Worst rate over transforms in the respective declared sets.
    pub fn max_eps_ref(&self) -> f64 {
        worst(self.rows.iter().filter(|r| r.in_ref_set).map(|r| r.eps_ref))
    }

    pub fn max_eps_pgws(&self) -> f64 {
        worst(self.rows.iter().filter(|r| r.in_pgws_set).map(|r| r.eps_pgws))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_csv(&ROBUSTNESS_HEADER, &self.rows, path)
    }
}

fn worst(rates: impl Iterator<Item = f64>) -> f64 {
    rates.fold(0.0, f64::max)
}

/// Watermark every image once, then push it through every transform.
pub fn robustness(scheme: &Rpws, sk: &SecretKey, corpus: &[Image], suite: &[TransformSpec]) -> Result<RobustnessReport> {
    if corpus.is_empty() {
        return Err(Error::CorpusTooSmall { needed: 1, got: 0 });
    }
    let pk = sk.public_key();
    let capacity = scheme.pgws().capacity();
    let mut ref_miss = vec![0usize; suite.len()];
    let mut pgws_miss = vec![0usize; suite.len()];
    let mut detected = vec![0usize; suite.len()];
    let mut composed = 0usize;
    let mut min_psnr = f64::INFINITY;

    for img in corpus {
        let payload = scheme.payload_for(sk, img)?;
        let message = payload.to_message(capacity)?;
        let marked = scheme.pgws().encode(img, &message)?;
        min_psnr = min_psnr.min(psnr(img, &marked)?);
        let e = ref_embed(img);
        if ref_compare(&e, &ref_embed(&marked), scheme.compare_params()) {
            composed += 1;
        }
        for (k, t) in suite.iter().enumerate() {
            if !ref_compare(&e, &ref_embed(&apply(t, img)?), scheme.compare_params()) {
                ref_miss[k] += 1;
            }
            let attacked = apply(t, &marked)?;
            if scheme.pgws().decode(&attacked).map_or(true, |m| m != message) {
                pgws_miss[k] += 1;
            }
            if scheme.detect(&pk, &attacked).overall {
                detected[k] += 1;
            }
        }
    }

    let n = corpus.len();
    let rate = |c: usize| c as f64 / n as f64;
    let rows = suite
        .iter()
        .enumerate()
        .map(|(k, t)| RobustnessRow {
            transform: t.label(),
            in_ref_set: t.in_ref_set(),
            in_pgws_set: t.in_pgws_set(),
            n,
            eps_ref: rate(ref_miss[k]),
            eps_pgws: rate(pgws_miss[k]),
            detection_rate: rate(detected[k]),
        })
        .collect();
    Ok(RobustnessReport {
        rows,
        composition_rate: rate(composed),
        min_psnr,
    })
}
