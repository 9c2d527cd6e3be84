//! Seeded experiment sweeps, record tables, and the identity self-test.
//!
//! Every trial draws from its own random stream, trials run on a worker pool
//! capped by `OPLIP_THREADS`, and results are emitted in trial order, so a
//! given configuration always produces byte-identical output.

mod config;
mod pool;
mod ratios;
mod record;
mod suite;
mod sweeps;

pub use config::{ExperimentConfig, OutputFormat};
pub use pool::{run_trials, thread_cap, THREADS_ENV};
pub use ratios::{
    commutator_measure, commutator_ratio, difference_measure, difference_ratio, doi_measures, doi_ratio, lp_measures, lp_ratio,
    normal_from_pair, normal_ratio, normality_defect, spectrum_of, DifferenceMeasure, Measure, CROSS_CHECK_TOL,
};
pub use record::{format_float, ratio, records_table, with_summaries, write_records, Cell, RatioRecord, Table, TrialOutcome, CSV_HEADER};
pub use suite::{run_identity_suite, CheckResult, SuiteOptions, SuiteReport};
pub use sweeps::{
    contraction_sweep, contraction_table, deleeuw_family, deleeuw_spread, deleeuw_sweep, integer_map, transference_sweep,
    transference_table, ContractionRow, DeLeeuwConfig, IntegerMap, TransferenceConfig, TransferenceRow, CONJUGATION_TOL, SYMBOL_TOL,
};
