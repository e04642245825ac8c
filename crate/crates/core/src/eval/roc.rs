use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scored, labelled pair: `true` for a positive pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub score: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    pub auc: f64,
    pub scores: Vec<LabeledScore>,
}

impl RocResult {
    pub fn from_scores(scores: Vec<LabeledScore>) -> Result<Self> {
        let auc = roc_auc(&scores)?;
        Ok(Self { auc, scores })
    }

    pub fn mean_score(&self, positive: bool) -> f64 {
        let (sum, n) = self
            .scores
            .iter()
            .filter(|s| s.positive == positive)
            .fold((0.0, 0usize), |(s, n), x| (s + x.score, n + 1));
        sum / n as f64
    }
}

/// Area under the ROC curve as the Mann-Whitney statistic: the probability
/// that a random positive outscores a random negative, ties counting half.
/// Computed from mid-ranks in `O(n log n)`.
pub fn roc_auc(scores: &[LabeledScore]) -> Result<f64> {
    let n_pos = scores.iter().filter(|s| s.positive).count();
    let n_neg = scores.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidParameter(format!(
            "ROC needs both classes, got {n_pos} positive and {n_neg} negative scores"
        )));
    }
    let mut sorted: Vec<&LabeledScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1].score == sorted[i].score {
            j += 1;
        }
        // ranks are 1-based; the tie group i..=j shares the mean rank
        let mid_rank = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = sorted[i..=j].iter().filter(|s| s.positive).count();
        rank_sum += mid_rank * pos_in_group as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
