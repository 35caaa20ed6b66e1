use std::path::PathBuf;

use super::config::RunConfig;
use super::export::{
    read_stage_reports, write_allocation, write_basic_strata, write_cv_summary, write_solution, write_stage_report,
    write_trace, write_trials,
};
use crate::pipeline::{
    benchmark_report, preset, random_search_tune, run_on_strata, BenchmarkEntry, Mode, ParamSpace, PipelineOutcome,
    PipelineSpec, TuneOutcome, PRESETS,
};
use crate::strata::{build_atomic_strata, build_continuous_strata, BasicStrata};
use crate::{Error, Result};

fn basic_strata(config: &RunConfig) -> Result<BasicStrata> {
    let frame = config.load_frame()?;
    match config.run.mode {
        Mode::Atomic => build_atomic_strata(&frame),
        Mode::Continuous => build_continuous_strata(&frame),
    }
}

fn write_text(path: &std::path::Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn absolute(path: &std::path::Path) -> Result<PathBuf> {
    if path.is_absolute() {
        return Ok(path.to_path_buf());
    }
    let cwd = std::env::current_dir().map_err(|e| Error::io(path, e))?;
    Ok(cwd.join(path))
}

/// Write `basic_strata.csv`; returns its path and row count.
pub fn cmd_build_strata(config: &RunConfig) -> Result<(PathBuf, usize)> {
    let strata = basic_strata(config)?;
    let path = config.run.output.join("basic_strata.csv");
    write_basic_strata(&path, &strata)?;
    Ok((path, strata.len()))
}

#[derive(Debug, Clone)]
pub struct OptimizeSummary {
    pub combination: String,
    pub total: f64,
    pub outcome: PipelineOutcome,
    pub output: PathBuf,
}

fn combination_name(config: &RunConfig, spec: &PipelineSpec) -> String {
    config.run.preset.clone().unwrap_or_else(|| spec.combination())
}

fn export_run(dir: &std::path::Path, combination: &str, spec: &PipelineSpec, out: &PipelineOutcome) -> Result<()> {
    let last = out.last();
    write_solution(&dir.join("solution.csv"), &out.strata, &last.stratification)?;
    write_allocation(
        &dir.join("allocation.csv"),
        &out.strata,
        &last.stratification,
        &last.cost,
    )?;
    write_cv_summary(&dir.join("cv_summary.csv"), &out.strata, &spec.precision, &last.cost)?;
    write_stage_report(&dir.join("stage_report.csv"), combination, &out.reports())?;
    if !out.trace.is_empty() {
        write_trace(&dir.join("trace.csv"), &out.trace)?;
    }
    Ok(())
}

/// Run the configured pipeline and export the final solution, its
/// allocation, the CV summary, the stage report and the climb trace.
pub fn cmd_optimize(config: &RunConfig) -> Result<OptimizeSummary> {
    let spec = config.pipeline()?;
    let strata = basic_strata(config)?;
    let outcome = run_on_strata(strata, &spec)?;
    let combination = combination_name(config, &spec);
    export_run(&config.run.output, &combination, &spec, &outcome)?;
    Ok(OptimizeSummary {
        combination,
        total: outcome.sample_size(),
        outcome,
        output: config.run.output.clone(),
    })
}

#[derive(Debug, Clone)]
pub struct TuneSummary {
    pub outcome: TuneOutcome,
    pub trials_path: PathBuf,
    pub best_config_path: PathBuf,
}

/// Random-search the `[tune]` space, log every trial to `trials.csv` and
/// write `best_config.toml`, a config that replays the best trial.
pub fn cmd_tune(config: &RunConfig) -> Result<TuneSummary> {
    let tune = config
        .tune
        .as_ref()
        .ok_or_else(|| Error::Config("tune needs a [tune] section".into()))?;
    let spec = config.pipeline()?;
    let space = if tune.space.params.is_empty() {
        ParamSpace::default_for(spec.stages[0].kind)
    } else {
        tune.space.clone()
    };
    let strata = basic_strata(config)?;
    let outcome = random_search_tune(
        &strata,
        &spec,
        &space,
        tune.budget,
        tune.seed.unwrap_or(config.run.seed),
    )?;
    let trials_path = config.run.output.join("trials.csv");
    write_trials(&trials_path, &outcome.trials)?;

    let mut best = config.clone();
    best.run.preset = None;
    best.stages = outcome.best_spec.stages.clone();
    best.tune = None;
    best.report = None;
    best.suite = None;
    best.run.output = config.run.output.join("best");
    best.input.path = absolute(&config.input.path)?;
    best.run.output = absolute(&best.run.output)?;
    let text = toml::to_string_pretty(&best).map_err(|e| Error::Internal(e.to_string()))?;
    let best_config_path = config.run.output.join("best_config.toml");
    write_text(&best_config_path, &text)?;
    Ok(TuneSummary {
        outcome,
        trials_path,
        best_config_path,
    })
}

/// Tabulate the stage reports listed under `[report]` into
/// `benchmark.txt` and `plot_data.csv`.
pub fn cmd_report(config: &RunConfig) -> Result<Vec<BenchmarkEntry>> {
    let report = config
        .report
        .as_ref()
        .ok_or_else(|| Error::Config("report needs a [report] section".into()))?;
    if report.inputs.is_empty() {
        return Err(Error::Config("report.inputs is empty".into()));
    }
    let mut entries = Vec::new();
    for p in &report.inputs {
        for (combination, stages) in read_stage_reports(p)? {
            entries.push(BenchmarkEntry { combination, stages });
        }
    }
    write_benchmark(config, &entries)?;
    Ok(entries)
}

fn write_benchmark(config: &RunConfig, entries: &[BenchmarkEntry]) -> Result<()> {
    let r = benchmark_report(entries);
    write_text(&config.run.output.join("benchmark.txt"), &r.table)?;
    write_text(&config.run.output.join("plot_data.csv"), &r.plot_data)
}

#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub runs: Vec<(String, PipelineOutcome)>,
    pub entries: Vec<BenchmarkEntry>,
}

/// Run several presets on one set of basic strata, exporting each into its
/// own subdirectory, then write the benchmark table and plot data.
pub fn cmd_suite(config: &RunConfig) -> Result<SuiteSummary> {
    let names: Vec<String> = match &config.suite {
        Some(s) if !s.presets.is_empty() => s.presets.clone(),
        _ => PRESETS.iter().map(|s| s.to_string()).collect(),
    };
    let base = PipelineSpec {
        mode: config.run.mode,
        stages: Vec::new(),
        precision: config.precision_spec()?,
        seed: config.run.seed,
    };
    let strata = basic_strata(config)?;
    let mut runs = Vec::new();
    let mut entries = Vec::new();
    for name in names {
        let spec = PipelineSpec {
            stages: preset(&name, config.run.mode)?,
            ..base.clone()
        };
        let out = run_on_strata(strata.clone(), &spec)?;
        export_run(&config.run.output.join(&name), &name, &spec, &out)?;
        entries.push(BenchmarkEntry {
            combination: name.clone(),
            stages: out.reports(),
        });
        runs.push((name, out));
    }
    write_benchmark(config, &entries)?;
    Ok(SuiteSummary { runs, entries })
}
