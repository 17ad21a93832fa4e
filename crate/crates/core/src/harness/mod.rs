//! Configuration, runs, truncation studies and reports.

pub mod check;
pub mod config;
pub mod quantity;
pub mod report;
pub mod run;
pub mod study;

pub use config::{load_config, parse_config, save_config, CheckConfig, FitConfig, RunConfig, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV};
pub use quantity::Quantity;
pub use report::{decay_report, decay_report_from_series, DecayEntry, DecayReport, Regime, SCHEMA_VERSION};
pub use run::{read_records_csv, run, run_to_dir, InvariantCheck, RunOutcome, RunStatus, RunSummary, CSV_COLUMNS};
pub use check::{check_suite, CheckReport, CheckResult};
pub use study::{truncation_study, truncation_study_to_dir, StudyReport, TrendTarget, TruncationStudy};
