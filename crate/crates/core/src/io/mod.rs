//! Run configuration, file formats and the command implementations.
//!
//! Every command takes a [`RunConfig`] and writes delimited UTF-8 files with
//! fixed headers into the configured output directory. Data files carry no
//! timestamps, so repeated runs of one config produce identical bytes (stage
//! reports hold wall times and are the one exception).

mod binning;
mod commands;
mod config;
mod export;
pub mod swiss;

pub use binning::{quantile_bins, BinnedColumn};
pub use commands::{
    cmd_build_strata, cmd_optimize, cmd_report, cmd_suite, cmd_tune, OptimizeSummary, SuiteSummary, TuneSummary,
};
pub use config::{
    load_config, CvTargets, InputSection, Overrides, PrecisionSection, ReportSection, RunConfig, RunSection,
    SuiteSection, TuneSection,
};
pub use export::{
    read_solution, read_stage_reports, write_allocation, write_basic_strata, write_cv_summary, write_solution,
    write_stage_report, write_trace, write_trials,
};
