use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pubmark_core::eval::{
    attack_sweep, build_triples, clean_report, control_sweep, report_csv, robustness, subsample_triples,
    triples_from_pairs, write_csv, EvalTriple, CLEAN_HEADER,
};
use pubmark_core::sig::{self, SECURITY_BITS};
use pubmark_core::{
    load_png, lsb_detect, lsb_watermark, psnr, save_png, Pgws, PublicKey, Rpws, SecretKey,
};
use serde::Serialize;

use crate::config::Config;
use crate::corpus::{Corpus, CorpusSource};

#[derive(Debug, Parser)]
#[command(name = "pubmark", version, about = "Publicly detectable image watermarking")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair as <PREFIX>.sk and <PREFIX>.pk.
    Keygen(KeygenArgs),
    /// Watermark a PNG and print the PSNR of the result.
    Watermark(WatermarkArgs),
    /// Check a PNG for a watermark. Exit 0 if found, 1 if not.
    Detect(DetectArgs),
    /// Run an evaluation and write a CSV report.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// Signature in the least significant bits. Fragile.
    Lsb,
    /// Signed perceptual hash in a robust DCT-domain channel.
    Rpws,
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    pub prefix: PathBuf,
    /// Overwrite existing key files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct WatermarkArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    #[arg(long)]
    pub sk: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, value_enum)]
    pub scheme: Scheme,
    #[arg(long)]
    pub pk: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    pub input: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    /// Per-transform detection rates of the full scheme.
    Robustness,
    /// Clean ROC AUC per transform.
    CleanRoc,
    /// Attack sweep over norms and epsilons.
    Attack,
}

impl EvalMode {
    fn name(self) -> &'static str {
        match self {
            EvalMode::Robustness => "robustness",
            EvalMode::CleanRoc => "clean-roc",
            EvalMode::Attack => "attack",
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(value_enum)]
    pub mode: EvalMode,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory of PNGs or synthetic:<seed>:<count>:<size>. Overrides the
    /// config.
    #[arg(long)]
    pub corpus: Option<String>,
    /// CSV output path. Metadata goes next to it as <name>.meta.toml.
    #[arg(long)]
    pub out: PathBuf,
}

/// Returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Keygen(a) => keygen(&a).map(|_| 0),
        Command::Watermark(a) => watermark(&a).map(|_| 0),
        Command::Detect(a) => detect(&a).map(exit_code),
        Command::Eval(a) => eval(&a).map(|_| 0),
    }
}

pub fn exit_code(detected: bool) -> i32 {
    if detected {
        0
    } else {
        crate::EXIT_NOT_DETECTED
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn key_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    (with_suffix(prefix, ".sk"), with_suffix(prefix, ".pk"))
}

pub fn keygen(args: &KeygenArgs) -> Result<()> {
    let (sk_path, pk_path) = key_paths(&args.prefix);
    if !args.force {
        for p in [&sk_path, &pk_path] {
            if p.exists() {
                bail!("{} exists; pass --force to overwrite", p.display());
            }
        }
    }
    let (sk, pk) = sig::generate(SECURITY_BITS)?;
    write_key(&sk_path, &sk.to_hex(), args.force)?;
    write_key(&pk_path, &pk.to_hex(), args.force)?;
    println!("{}", sk_path.display());
    println!("{}", pk_path.display());
    Ok(())
}

fn write_key(path: &Path, hex: &str, force: bool) -> Result<()> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if force {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    let mut f = opts.open(path).with_context(|| format!("writing {}", path.display()))?;
    writeln!(f, "{hex}").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_secret_key(path: &Path) -> Result<SecretKey> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SecretKey::from_hex(text.trim()).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_public_key(path: &Path) -> Result<PublicKey> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PublicKey::from_hex(text.trim()).with_context(|| format!("parsing {}", path.display()))
}

fn rpws_scheme(cfg: &Config) -> Result<Rpws> {
    Ok(Rpws::new(Pgws::new(cfg.pgws.clone())?, cfg.compare)?)
}

pub fn watermark(args: &WatermarkArgs) -> Result<f64> {
    let cfg = Config::load_or_default(args.config.as_deref())?;
    let sk = read_secret_key(&args.sk)?;
    let img = load_png(&args.input)?;
    let out = match args.scheme {
        Scheme::Lsb => lsb_watermark(&sk, &img)?,
        Scheme::Rpws => rpws_scheme(&cfg)?.watermark(&sk, &img)?,
    };
    save_png(&out, &args.output)?;
    let p = psnr(&img, &out)?;
    println!("PSNR {p:.4} dB");
    Ok(p)
}

pub fn detect(args: &DetectArgs) -> Result<bool> {
    let cfg = Config::load_or_default(args.config.as_deref())?;
    let pk = read_public_key(&args.pk)?;
    let img = load_png(&args.input)?;
    match args.scheme {
        Scheme::Lsb => {
            let found = lsb_detect(&pk, &img);
            println!("{found}");
            Ok(found)
        }
        Scheme::Rpws => {
            let report = rpws_scheme(&cfg)?.detect(&pk, &img);
            println!("{}", report.to_json_line());
            Ok(report.overall)
        }
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    version: String,
    mode: &'static str,
    corpus: CorpusInfo,
    summary: BTreeMap<&'static str, f64>,
    config: &'a Config,
}

#[derive(Serialize)]
struct CorpusInfo {
    source: String,
    bases: usize,
    positives: usize,
    triples: usize,
}

pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta.toml")
}

pub fn control_path(out: &Path) -> PathBuf {
    out.with_extension("control.csv")
}

fn eval_key(cfg: &Config) -> Result<SecretKey> {
    match &cfg.keys.sk {
        Some(p) => read_secret_key(p),
        None => Ok(SecretKey::from_seed(cfg.keys.eval_seed)),
    }
}

fn triples_for(cfg: &Config, corpus: &Corpus) -> Result<Vec<EvalTriple>> {
    let seed = cfg.corpus.triple_seed;
    Ok(if corpus.positives.is_empty() {
        build_triples(&corpus.bases, &cfg.transform, seed)?
    } else {
        triples_from_pairs(&corpus.bases, &corpus.positives, seed)?
    })
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let mut cfg = Config::load_or_default(args.config.as_deref())?;
    if let Some(c) = &args.corpus {
        cfg.corpus.source = c.clone();
    }
    let source: CorpusSource = cfg.corpus.source.parse()?;
    let corpus = source.load()?;
    let mut summary = BTreeMap::new();
    let mut n_triples = 0;

    match args.mode {
        EvalMode::Robustness => {
            let report = robustness(&rpws_scheme(&cfg)?, &eval_key(&cfg)?, &corpus.bases, &cfg.transform)?;
            report.write_csv(&args.out)?;
            summary.insert("composition_rate", report.composition_rate);
            summary.insert("min_psnr", report.min_psnr);
            summary.insert("max_eps_ref", report.max_eps_ref());
            summary.insert("max_eps_pgws", report.max_eps_pgws());
        }
        EvalMode::CleanRoc => {
            let triples = triples_for(&cfg, &corpus)?;
            n_triples = triples.len();
            let rows = clean_report(&triples, cfg.compare.tau)?;
            if let Some(all) = rows.last() {
                summary.insert("auc", all.auc);
            }
            write_csv(&CLEAN_HEADER, &rows, &args.out)?;
        }
        EvalMode::Attack => {
            let triples = subsample_triples(triples_for(&cfg, &corpus)?, cfg.attack.max_triples, cfg.corpus.triple_seed);
            n_triples = triples.len();
            let a = &cfg.attack;
            let base = a.params();
            let rows = attack_sweep(&triples, &base, &a.norms, &a.epsilons, &cfg.compare, a.timing)?;
            report_csv(&rows, &args.out)?;
            if let Some(clean) = rows.first() {
                summary.insert("clean_auc", clean.clean_auc);
            }
            if a.control {
                let control = control_sweep(
                    &triples,
                    &base,
                    &a.norms,
                    &a.epsilons,
                    &cfg.compare,
                    a.control_seed,
                    a.timing,
                )?;
                report_csv(&control, &control_path(&args.out))?;
            }
        }
    }

    let meta = Meta {
        version: crate::version(),
        mode: args.mode.name(),
        corpus: CorpusInfo {
            source: cfg.corpus.source.clone(),
            bases: corpus.bases.len(),
            positives: corpus.positives.len(),
            triples: n_triples,
        },
        summary,
        config: &cfg,
    };
    let text = toml::to_string(&meta).context("serialising report metadata")?;
    let path = meta_path(&args.out);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
