//! Stage composition, tuning and benchmark reporting.
//!
//! A pipeline builds basic strata for its [`Mode`], runs each clustering
//! stage domain by domain (threading the stratification forward), finishes
//! with an optional global hill climb, and records the sample size and wall
//! time of every stage.

mod presets;
mod report;
mod run;
mod spec;
mod tune;

pub use presets::{preset, PRESETS};
pub use report::{benchmark_report, BenchmarkEntry, BenchmarkReport, PLOT_HEADER};
pub use run::{run_on_strata, run_pipeline, PipelineOutcome, StageOutcome, StageReport};
pub use spec::{Mode, ParamMap, PipelineSpec, StageKind, StageSpec};
pub use tune::{apply_params, random_search_tune, ParamRange, ParamSpace, TrialRecord, TuneOutcome};
