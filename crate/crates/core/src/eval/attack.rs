//! White-box collision attack on the perceptual hash.
//!
//! Momentum PGD on the surrogate score: positives are pushed away from their
//! base image, negatives are pulled towards it. Each step accumulates the
//! l1-normalised gradient into a momentum buffer, takes a sign step (l-inf)
//! or a sparse top-coordinate step (l1), and projects back onto the
//! epsilon-ball around the original image and onto `[0, 255]`.
//!
//! The l1 radius is `epsilon * 255 * D` with `D` the number of channel
//! values, so both norms share the same numeric epsilon grid.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{ref_embed, score, CompareParams, Direction, HashProjector, SurrogateVector};
use crate::error::{Error, Result};
use crate::eval::roc::{LabeledScore, RocResult};
use crate::eval::triples::{EvalTriple, HashRates};
use crate::image::{FloatImage, Image};

/// Epsilon numerators (over 255) swept by the attack benchmark.
pub const EPSILON_GRID: [u32; 6] = [1, 2, 4, 8, 16, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Linf,
    L1,
}

impl Norm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Norm::Linf => "linf",
            Norm::L1 => "l1",
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttackParams {
    pub norm: Norm,
    /// Budget numerator: epsilon = epsilon_num / 255.
    pub epsilon_num: u32,
    pub steps: usize,
    pub momentum: f64,
    /// Step size is `step_scale * epsilon / steps`.
    pub step_scale: f64,
    /// Fraction of coordinates moved by each l1 step.
    pub l1_sparsity: f64,
}

impl Default for AttackParams {
    fn default() -> Self {
        Self {
            norm: Norm::Linf,
            epsilon_num: 8,
            steps: 20,
            momentum: 0.9,
            step_scale: 2.5,
            l1_sparsity: 0.01,
        }
    }
}

impl AttackParams {
    pub fn with(norm: Norm, epsilon_num: u32) -> Self {
        Self {
            norm,
            epsilon_num,
            ..Self::default()
        }
    }

    pub fn epsilon(&self) -> f64 {
        f64::from(self.epsilon_num) / 255.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon_num != 0 && !EPSILON_GRID.contains(&self.epsilon_num) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_num {} not in {{0}} or {EPSILON_GRID:?}",
                self.epsilon_num
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidParameter(format!("momentum {} outside [0, 1)", self.momentum)));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidParameter("step_scale must be positive".into()));
        }
        if !(self.l1_sparsity > 0.0 && self.l1_sparsity <= 1.0) {
            return Err(Error::InvalidParameter("l1_sparsity outside (0, 1]".into()));
        }
        Ok(())
    }

    /// Ball radius in channel units: per coordinate for l-inf, total for l1.
    pub fn radius(&self, dim: usize) -> f64 {
        let per_coord = f64::from(self.epsilon_num);
        match self.norm {
            Norm::Linf => per_coord,
            Norm::L1 => per_coord * dim as f64,
        }
    }

    /// Step length in channel units: per coordinate for l-inf, total for l1.
    pub fn step_size(&self, dim: usize) -> f64 {
        self.step_scale * self.radius(dim) / self.steps as f64
    }
}

/// Momentum PGD against one target surrogate.
pub struct Pgd<'a> {
    projector: &'a HashProjector,
    params: AttackParams,
}

impl<'a> Pgd<'a> {
    pub fn new(projector: &'a HashProjector, params: AttackParams) -> Self {
        Self { projector, params }
    }

    /// One momentum step of length `step` followed by projection.
    /// `direction` is the way the score should move.
    pub fn step(
        &self,
        x: &mut FloatImage,
        orig: &FloatImage,
        momentum: &mut [f64],
        target: &SurrogateVector,
        direction: Direction,
        step: f64,
    ) {
        let g = self.projector.score_gradient(x, target, direction);
        let l1: f64 = g.iter().map(|v| v.abs()).sum();
        if l1 == 0.0 {
            return;
        }
        for (m, gi) in momentum.iter_mut().zip(&g) {
            *m = self.params.momentum * *m + gi / l1;
        }
        match self.params.norm {
            Norm::Linf => {
                for (xi, &m) in x.data.iter_mut().zip(momentum.iter()) {
                    if m != 0.0 {
                        *xi += step * m.signum();
                    }
                }
            }
            Norm::L1 => {
                let k = ((momentum.len() as f64 * self.params.l1_sparsity).ceil() as usize)
                    .clamp(1, momentum.len());
                let mut idx: Vec<usize> = (0..momentum.len()).collect();
                idx.select_nth_unstable_by(k - 1, |&a, &b| {
                    momentum[b].abs().total_cmp(&momentum[a].abs())
                });
                let per = step / k as f64;
                for &i in &idx[..k] {
                    if momentum[i] != 0.0 {
                        x.data[i] += per * momentum[i].signum();
                    }
                }
            }
        }
        self.project(x, orig);
    }

    fn project(&self, x: &mut FloatImage, orig: &FloatImage) {
        let r = self.params.radius(x.data.len());
        match self.params.norm {
            Norm::Linf => {
                for (xi, &o) in x.data.iter_mut().zip(&orig.data) {
                    *xi = xi.clamp(o - r, o + r).clamp(0.0, 255.0);
                }
            }
            Norm::L1 => {
                project_l1(&mut x.data, &orig.data, r);
                // clamping only moves coordinates towards the original
                for xi in x.data.iter_mut() {
                    *xi = xi.clamp(0.0, 255.0);
                }
            }
        }
    }

    /// Run all steps and return the final real-valued iterate.
    pub fn run_float(&self, orig: &FloatImage, target: &SurrogateVector, direction: Direction) -> FloatImage {
        let mut x = orig.clone();
        if self.params.epsilon_num == 0 {
            return x;
        }
        let mut momentum = vec![0.0; x.data.len()];
        let step = self.params.step_size(x.data.len());
        for _ in 0..self.params.steps {
            self.step(&mut x, orig, &mut momentum, target, direction, step);
        }
        x
    }

    /// Run the attack and quantise to 8 bits without leaving the ball.
    pub fn run(&self, orig: &Image, target: &SurrogateVector, direction: Direction) -> Image {
        if self.params.epsilon_num == 0 {
            return orig.clone();
        }
        let x0 = orig.to_float();
        let x = self.run_float(&x0, target, direction);
        quantize_in_ball(&x, orig, &self.params)
    }
}

/// Round to 8 bits. l-inf rounds to nearest and clips to the integer
/// radius; l1 truncates each perturbation towards zero so its l1 norm
/// cannot grow.
fn quantize_in_ball(x: &FloatImage, orig: &Image, params: &AttackParams) -> Image {
    let r = f64::from(params.epsilon_num);
    let data = x
        .data
        .iter()
        .zip(orig.as_bytes())
        .map(|(&v, &o)| {
            let o = f64::from(o);
            let q = match params.norm {
                Norm::Linf => v.round().clamp(o - r, o + r),
                Norm::L1 => o + (v - o).trunc(),
            };
            q.clamp(0.0, 255.0) as u8
        })
        .collect();
    Image::new(orig.width(), orig.height(), data).expect("same dimensions")
}

/// Euclidean projection of `x - center` onto the l1 ball of `radius`.
fn project_l1(x: &mut [f64], center: &[f64], radius: f64) {
    let mut mags: Vec<f64> = x
        .iter()
        .zip(center)
        .map(|(a, c)| (a - c).abs())
        .filter(|&d| d > 0.0)
        .collect();
    let total: f64 = mags.iter().sum();
    if total <= radius {
        return;
    }
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &m) in mags.iter().enumerate() {
        cumulative += m;
        let t = (cumulative - radius) / (i + 1) as f64;
        if m > t {
            theta = t;
        } else {
            break;
        }
    }
    for (xi, &c) in x.iter_mut().zip(center) {
        let d = *xi - c;
        *xi = c + d.signum() * (d.abs() - theta).max(0.0);
    }
}

/// Attack both pairs of a triple. The base image is left untouched.
pub fn pgd_attack(triple: &EvalTriple, params: &AttackParams) -> EvalTriple {
    let target = surrogate_of(&triple.base);
    let attack = |img: &Image, direction| {
        let projector = HashProjector::new(img.width(), img.height());
        Pgd::new(&projector, *params).run(img, &target, direction)
    };
    EvalTriple {
        positive: Arc::new(attack(&triple.positive, Direction::Descent)),
        negative: Arc::new(attack(&triple.negative, Direction::Ascent)),
        ..triple.clone()
    }
}

/// Control baseline: random perturbations with the same budget.
pub fn noise_attack(triple: &EvalTriple, params: &AttackParams, seed: u64) -> EvalTriple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturb = |img: &Image| {
        let mut x = img.to_float();
        let r = f64::from(params.epsilon_num);
        match params.norm {
            Norm::Linf => {
                for v in x.data.iter_mut() {
                    *v += if rng.gen::<bool>() { r } else { -r };
                }
            }
            Norm::L1 => {
                let d = x.data.len();
                let k = ((d as f64 * params.l1_sparsity).ceil() as usize).clamp(1, d);
                let per = params.radius(d) / k as f64;
                for _ in 0..k {
                    let i = rng.gen_range(0..d);
                    x.data[i] += if rng.gen::<bool>() { per } else { -per };
                }
            }
        }
        Arc::new(quantize_in_ball(&x, img, params))
    };
    EvalTriple {
        positive: perturb(&triple.positive),
        negative: perturb(&triple.negative),
        ..triple.clone()
    }
}

fn surrogate_of(img: &Image) -> SurrogateVector {
    HashProjector::new(img.width(), img.height()).surrogate(&img.to_float())
}

/// Scores and hash verdicts of an attacked dataset.
#[derive(Debug, Clone)]
pub struct AttackedRoc {
    pub roc: RocResult,
    pub hash: HashRates,
}

fn score_attacked<F>(triples: &[EvalTriple], compare: &CompareParams, mut attack: F) -> Result<AttackedRoc>
where
    F: FnMut(usize, &EvalTriple) -> EvalTriple,
{
    if triples.is_empty() {
        return Err(Error::InvalidParameter("no triples to attack".into()));
    }
    let mut scores = Vec::with_capacity(2 * triples.len());
    let (mut fa, mut fr) = (0usize, 0usize);
    for (i, t) in triples.iter().enumerate() {
        let attacked = attack(i, t);
        let base = surrogate_of(&attacked.base);
        scores.push(LabeledScore {
            score: score(&base, &surrogate_of(&attacked.positive)),
            positive: true,
        });
        scores.push(LabeledScore {
            score: score(&base, &surrogate_of(&attacked.negative)),
            positive: false,
        });
        let eb = ref_embed(&attacked.base);
        if eb.hamming(&ref_embed(&attacked.positive)) > compare.tau {
            fr += 1;
        }
        if eb.hamming(&ref_embed(&attacked.negative)) <= compare.tau {
            fa += 1;
        }
    }
    let n = triples.len() as f64;
    Ok(AttackedRoc {
        roc: RocResult::from_scores(scores)?,
        hash: HashRates {
            far: fa as f64 / n,
            frr: fr as f64 / n,
        },
    })
}

/// Attack every triple and score the result like the clean dataset.
pub fn attacked_roc(triples: &[EvalTriple], params: &AttackParams, compare: &CompareParams) -> Result<AttackedRoc> {
    params.validate()?;
    score_attacked(triples, compare, |_, t| pgd_attack(t, params))
}

/// The random-noise control at the same budget. Each triple gets its own
/// seed derived from `seed` and its position.
pub fn noise_roc(
    triples: &[EvalTriple],
    params: &AttackParams,
    compare: &CompareParams,
    seed: u64,
) -> Result<AttackedRoc> {
    params.validate()?;
    score_attacked(triples, compare, |i, t| {
        noise_attack(t, params, seed.wrapping_add(i as u64))
    })
}

/// Trapezoid area under an AUC-versus-epsilon curve, epsilon in `[0, 1]`
/// units. `points` must be sorted by epsilon.
pub fn auc_curve_area(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}
