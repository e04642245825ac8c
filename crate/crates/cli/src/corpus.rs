//! Corpus sources: a seeded synthetic corpus or a directory of PNGs.
//!
//! In a directory, `<id>.png` is a base image and `<id>__<label>.png` is a
//! transformed copy of base `<id>` labelled `<label>`. Files are read in
//! name order.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use pubmark_core::{generate_corpus, load_png, CorpusSpec, Image};

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Synthetic(CorpusSpec),
    Directory(PathBuf),
}

impl FromStr for CorpusSource {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("synthetic:") else {
            return Ok(CorpusSource::Directory(PathBuf::from(s)));
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let [seed, count, size] = parts[..] else {
            bail!("synthetic corpus must look like synthetic:<seed>:<count>:<size>, got {s:?}");
        };
        let size: u32 = size.parse().with_context(|| format!("bad size in {s:?}"))?;
        if size == 0 {
            bail!("synthetic image size must be positive");
        }
        Ok(CorpusSource::Synthetic(CorpusSpec::new(
            seed.parse().with_context(|| format!("bad seed in {s:?}"))?,
            count.parse().with_context(|| format!("bad count in {s:?}"))?,
            size,
        )))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub ids: Vec<String>,
    pub bases: Vec<Image>,
    /// `(base index, label, image)`.
    pub positives: Vec<(usize, String, Image)>,
}

impl CorpusSource {
    pub fn load(&self) -> Result<Corpus> {
        match self {
            CorpusSource::Synthetic(spec) => {
                let bases = generate_corpus(spec);
                Ok(Corpus {
                    ids: (0..bases.len()).map(|i| format!("{i:05}")).collect(),
                    bases,
                    positives: Vec::new(),
                })
            }
            CorpusSource::Directory(dir) => load_dir(dir),
        }
    }
}

fn load_dir(dir: &Path) -> Result<Corpus> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("png")));
    files.sort();

    let mut corpus = Corpus::default();
    let mut pending = Vec::new();
    for path in files {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| anyhow!("non UTF-8 file name {}", path.display()))?
            .to_owned();
        let img = load_png(&path).with_context(|| format!("loading {}", path.display()))?;
        match stem.split_once("__") {
            Some((id, label)) => pending.push((id.to_owned(), label.to_owned(), img)),
            None => {
                corpus.ids.push(stem);
                corpus.bases.push(img);
            }
        }
    }
    for (id, label, img) in pending {
        let idx = corpus
            .ids
            .iter()
            .position(|b| *b == id)
            .ok_or_else(|| anyhow!("positive {id}__{label}.png has no base {id}.png"))?;
        corpus.positives.push((idx, label, img));
    }
    if corpus.bases.is_empty() {
        bail!("no base images in {}", dir.display());
    }
    Ok(corpus)
}
