//! AUC and the experiment harness: named variants, grid sweeps and report files.

mod auc;
mod harness;
mod report;

pub use auc::{auc, auc_brute_force, per_student_auc};
pub use harness::{evaluate, grid_search, run_variant, run_with_label, GridKnob, GridSpec};
pub use report::{read_report, write_index, write_report, EvalReport, Variant, REPORT_FORMAT};
