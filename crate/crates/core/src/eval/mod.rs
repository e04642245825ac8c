//! Evaluation harness: clean and attacked ROC on image triples, and
//! per-transform robustness of the watermark.

mod attack;
mod report;
mod robustness;
mod roc;
mod triples;

pub use attack::{
    attacked_roc, auc_curve_area, noise_attack, noise_roc, pgd_attack, AttackParams, AttackedRoc, Norm, Pgd,
    EPSILON_GRID,
};
pub use report::{attack_sweep, control_sweep, read_csv, report_csv, write_csv, AttackRow, CSV_HEADER};
pub use robustness::{robustness, ROBUSTNESS_HEADER, RobustnessReport, RobustnessRow};
pub use roc::{roc_auc, LabeledScore, RocResult};
pub use triples::{
    build_triples, clean_report, clean_roc, hash_rates, subsample_triples, triples_from_pairs, CleanRow, EvalTriple,
    HashRates, CLEAN_HEADER,
};
