use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::embedding::CompareParams;
use crate::error::{Error, Result};
use crate::eval::attack::{attacked_roc, noise_roc, AttackParams, AttackedRoc, Norm};
use crate::eval::triples::{clean_roc, EvalTriple};

pub const CSV_HEADER: [&str; 7] = [
    "norm",
    "epsilon_num",
    "clean_auc",
    "attacked_auc",
    "hash_far",
    "hash_frr",
    "seconds",
];

/// One row of the attack sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRow {
    pub norm: Norm,
    pub epsilon_num: u32,
    pub clean_auc: f64,
    pub attacked_auc: f64,
    pub hash_far: f64,
    pub hash_frr: f64,
    pub seconds: f64,
}

/// Run the attack for every `(norm, epsilon)` pair.
///
/// `seconds` stays 0 unless `timing` is set, so untimed sweeps are
/// reproducible byte for byte.
pub fn attack_sweep(
    triples: &[EvalTriple],
    base: &AttackParams,
    norms: &[Norm],
    epsilons: &[u32],
    compare: &CompareParams,
    timing: bool,
) -> Result<Vec<AttackRow>> {
    sweep(triples, base, norms, epsilons, timing, |p| attacked_roc(triples, p, compare))
}

/// The random-noise control over the same grid.
pub fn control_sweep(
    triples: &[EvalTriple],
    base: &AttackParams,
    norms: &[Norm],
    epsilons: &[u32],
    compare: &CompareParams,
    seed: u64,
    timing: bool,
) -> Result<Vec<AttackRow>> {
    sweep(triples, base, norms, epsilons, timing, |p| noise_roc(triples, p, compare, seed))
}

fn sweep<F>(
    triples: &[EvalTriple],
    base: &AttackParams,
    norms: &[Norm],
    epsilons: &[u32],
    timing: bool,
    mut run: F,
) -> Result<Vec<AttackRow>>
where
    F: FnMut(&AttackParams) -> Result<AttackedRoc>,
{
    let clean = clean_roc(triples)?.auc;
    let mut rows = Vec::with_capacity(norms.len() * epsilons.len());
    for &norm in norms {
        for &epsilon_num in epsilons {
            let params = AttackParams {
                norm,
                epsilon_num,
                ..*base
            };
            let start = Instant::now();
            let attacked = run(&params)?;
            rows.push(AttackRow {
                norm,
                epsilon_num,
                clean_auc: clean,
                attacked_auc: attacked.roc.auc,
                hash_far: attacked.hash.far,
                hash_frr: attacked.hash.frr,
                seconds: if timing { start.elapsed().as_secs_f64() } else { 0.0 },
            });
        }
    }
    Ok(rows)
}

pub fn report_csv(rows: &[AttackRow], path: &Path) -> Result<()> {
    write_csv(&CSV_HEADER, rows, path)
}

/// Write `header` and then one serialised record per row. The header is
/// written even when there are no rows.
pub fn write_csv<T: Serialize>(header: &[&str], rows: &[T], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<AttackRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidParameter(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}
