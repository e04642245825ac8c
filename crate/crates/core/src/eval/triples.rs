use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{ref_embed, ref_surrogate, score};
use crate::error::{Error, Result};
use crate::eval::roc::{LabeledScore, RocResult};
use crate::image::Image;
use crate::transforms::{apply, TransformSpec};

/// A base image with one transformed copy of itself (positive) and one
/// unrelated image (negative).
#[derive(Debug, Clone)]
pub struct EvalTriple {
    pub base: Arc<Image>,
    pub positive: Arc<Image>,
    pub negative: Arc<Image>,
    /// Label of the transform that produced `positive`.
    pub transform: String,
    pub base_index: usize,
    pub negative_index: usize,
}

/// One triple per `(base, transform)`, negatives drawn uniformly from the
/// other corpus images.
pub fn build_triples(corpus: &[Image], suite: &[TransformSpec], seed: u64) -> Result<Vec<EvalTriple>> {
    if corpus.len() < 2 {
        return Err(Error::CorpusTooSmall {
            needed: 2,
            got: corpus.len(),
        });
    }
    let shared: Vec<Arc<Image>> = corpus.iter().cloned().map(Arc::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(corpus.len() * suite.len());
    for (i, base) in shared.iter().enumerate() {
        for t in suite {
            let mut j = rng.gen_range(0..shared.len() - 1);
            if j >= i {
                j += 1;
            }
            out.push(EvalTriple {
                base: Arc::clone(base),
                positive: Arc::new(apply(t, base)?),
                negative: Arc::clone(&shared[j]),
                transform: t.label(),
                base_index: i,
                negative_index: j,
            });
        }
    }
    Ok(out)
}

/// Triples from positives supplied by the caller, as `(base index, label,
/// image)`. Negatives are drawn as in [`build_triples`].
pub fn triples_from_pairs(bases: &[Image], pairs: &[(usize, String, Image)], seed: u64) -> Result<Vec<EvalTriple>> {
    if bases.len() < 2 {
        return Err(Error::CorpusTooSmall {
            needed: 2,
            got: bases.len(),
        });
    }
    let shared: Vec<Arc<Image>> = bases.iter().cloned().map(Arc::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs
        .iter()
        .map(|(i, label, img)| {
            let i = *i;
            if i >= shared.len() {
                return Err(Error::InvalidParameter(format!("positive refers to missing base {i}")));
            }
            let mut j = rng.gen_range(0..shared.len() - 1);
            if j >= i {
                j += 1;
            }
            Ok(EvalTriple {
                base: Arc::clone(&shared[i]),
                positive: Arc::new(img.clone()),
                negative: Arc::clone(&shared[j]),
                transform: label.clone(),
                base_index: i,
                negative_index: j,
            })
        })
        .collect()
}

/// Score both pairs of every triple with the normalised surrogate dot
/// product and compute the AUC.
pub fn clean_roc(triples: &[EvalTriple]) -> Result<RocResult> {
    if triples.is_empty() {
        return Err(Error::InvalidParameter("no triples to score".into()));
    }
    let scores = triples
        .iter()
        .flat_map(|t| {
            let base = ref_surrogate(&t.base);
            [
                LabeledScore {
                    score: score(&base, &ref_surrogate(&t.positive)),
                    positive: true,
                },
                LabeledScore {
                    score: score(&base, &ref_surrogate(&t.negative)),
                    positive: false,
                },
            ]
        })
        .collect();
    RocResult::from_scores(scores)
}

/// A seeded subset of at most `max` triples, kept in their original order.
/// `max == 0` keeps everything.
pub fn subsample_triples(triples: Vec<EvalTriple>, max: usize, seed: u64) -> Vec<EvalTriple> {
    if max == 0 || triples.len() <= max {
        return triples;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = rand::seq::index::sample(&mut rng, triples.len(), max).into_vec();
    keep.sort_unstable();
    let mut keep = keep.into_iter().peekable();
    triples
        .into_iter()
        .enumerate()
        .filter_map(|(i, t)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(t)
            } else {
                None
            }
        })
        .collect()
}

pub const CLEAN_HEADER: [&str; 5] = ["transform", "pairs", "auc", "hash_far", "hash_frr"];

/// Clean AUC and hash error rates for one transform, or for all triples
/// under the label `all`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanRow {
    pub transform: String,
    pub pairs: usize,
    pub auc: f64,
    pub hash_far: f64,
    pub hash_frr: f64,
}

pub fn clean_report(triples: &[EvalTriple], tau: u32) -> Result<Vec<CleanRow>> {
    let mut labels: Vec<&str> = Vec::new();
    for t in triples {
        if !labels.contains(&t.transform.as_str()) {
            labels.push(&t.transform);
        }
    }
    let row = |label: &str, subset: &[EvalTriple]| -> Result<CleanRow> {
        let rates = hash_rates(subset, tau);
        Ok(CleanRow {
            transform: label.to_owned(),
            pairs: subset.len(),
            auc: clean_roc(subset)?.auc,
            hash_far: rates.far,
            hash_frr: rates.frr,
        })
    };
    let mut rows = Vec::with_capacity(labels.len() + 1);
    for label in labels {
        let subset: Vec<EvalTriple> = triples.iter().filter(|t| t.transform == label).cloned().collect();
        rows.push(row(label, &subset)?);
    }
    rows.push(row("all", triples)?);
    Ok(rows)
}

/// Hash-level error rates: the fraction of negative pairs whose binary
/// embeddings match (false accepts) and of positive pairs that do not
/// (false rejects).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashRates {
    pub far: f64,
    pub frr: f64,
}

pub fn hash_rates(triples: &[EvalTriple], tau: u32) -> HashRates {
    let mut false_accepts = 0usize;
    let mut false_rejects = 0usize;
    for t in triples {
        let base = ref_embed(&t.base);
        if base.hamming(&ref_embed(&t.positive)) > tau {
            false_rejects += 1;
        }
        if base.hamming(&ref_embed(&t.negative)) <= tau {
            false_accepts += 1;
        }
    }
    let n = triples.len().max(1) as f64;
    HashRates {
        far: false_accepts as f64 / n,
        frr: false_rejects as f64 / n,
    }
}
