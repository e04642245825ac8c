use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pubmark_core::eval::{AttackParams, Norm, EPSILON_GRID};
use pubmark_core::{standard_suite, CompareParams, PgwsParams, TransformSpec};
use serde::{Deserialize, Serialize};

/// Everything a run depends on. Missing sections and keys take the library
/// defaults; unknown keys are an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub pgws: PgwsParams,
    #[serde(rename = "ref")]
    pub compare: CompareParams,
    pub attack: AttackSection,
    pub corpus: CorpusSection,
    pub keys: KeysSection,
    /// Transform suite; the standard suite when absent.
    pub transform: Vec<TransformSpec>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            pgws: PgwsParams::default(),
            compare: CompareParams::default(),
            attack: AttackSection::default(),
            corpus: CorpusSection::default(),
            keys: KeysSection::default(),
            transform: standard_suite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttackSection {
    pub norms: Vec<Norm>,
    pub epsilons: Vec<u32>,
    pub steps: usize,
    pub momentum: f64,
    pub step_scale: f64,
    pub l1_sparsity: f64,
    /// Evenly subsample the triple set down to this many; 0 keeps all.
    pub max_triples: usize,
    /// Also run the random-noise control and write it next to the report.
    pub control: bool,
    pub control_seed: u64,
    /// Record wall-clock seconds per row. Off by default so reports are
    /// reproducible.
    pub timing: bool,
}

impl Default for AttackSection {
    fn default() -> Self {
        let p = AttackParams::default();
        Self {
            norms: vec![Norm::Linf, Norm::L1],
            epsilons: EPSILON_GRID.to_vec(),
            steps: p.steps,
            momentum: p.momentum,
            step_scale: p.step_scale,
            l1_sparsity: p.l1_sparsity,
            max_triples: 100,
            control: false,
            control_seed: 0x6e6f_6973,
            timing: false,
        }
    }
}

impl AttackSection {
    pub fn params(&self) -> AttackParams {
        AttackParams {
            steps: self.steps,
            momentum: self.momentum,
            step_scale: self.step_scale,
            l1_sparsity: self.l1_sparsity,
            ..AttackParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusSection {
    /// `synthetic:<seed>:<count>:<size>` or a directory of PNG files.
    pub source: String,
    /// Seed for drawing negatives.
    pub triple_seed: u64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            source: "synthetic:0:100:256".into(),
            triple_seed: 0x7472_6970,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KeysSection {
    pub sk: Option<PathBuf>,
    pub pk: Option<PathBuf>,
    /// Seed for the throwaway evaluation key used when `sk` is unset.
    pub eval_seed: u64,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).context("invalid config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.pgws.validate()?;
        self.compare.validate()?;
        let base = self.attack.params();
        for &e in &self.attack.epsilons {
            AttackParams { epsilon_num: e, ..base }.validate()?;
        }
        base.validate()?;
        if self.transform.is_empty() {
            bail!("transform suite is empty");
        }
        for t in &self.transform {
            t.validate()?;
        }
        Ok(())
    }
}
