use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::binning::{quantile_bins, BinnedColumn};
use crate::allocation::PrecisionSpec;
use crate::pipeline::{preset, Mode, ParamSpace, PipelineSpec, StageSpec};
use crate::strata::{load_frame, Frame, Schema};
use crate::{Error, Result};

/// Everything one command run needs. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSection,
    pub schema: Schema,
    pub run: RunSection,
    pub precision: PrecisionSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub path: PathBuf,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    /// Quantile-binned auxiliaries computed before the schema is applied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derive: Vec<BinnedColumn>,
}

fn default_delimiter() -> String {
    ",".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub mode: Mode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Named stage sequence, used when no `[[stages]]` are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

/// One CV target for all variables, or one per target column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CvTargets {
    All(f64),
    Each(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionSection {
    pub cv: CvTargets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuneSection {
    pub budget: usize,
    /// Seed of the parameter draws; defaults to the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Ranges to search; empty means the defaults of the first stage.
    #[serde(default)]
    pub space: ParamSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSection {
    /// Stage-report files to tabulate.
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    /// Presets to benchmark; empty means all of them.
    #[serde(default)]
    pub presets: Vec<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

/// Read, resolve and validate a TOML config.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config: RunConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    config.resolve(base);
    if let Some(seed) = overrides.seed {
        config.run.seed = seed;
    }
    if let Some(w) = overrides.workers {
        config.run.workers = Some(w);
    }
    if let Some(o) = &overrides.output {
        config.run.output = o.clone();
    }
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.input.path);
        join(&mut self.run.output);
        if let Some(r) = &mut self.report {
            r.inputs.iter_mut().for_each(join);
        }
    }

    pub fn delimiter(&self) -> Result<u8> {
        match self.input.delimiter.as_bytes() {
            [b] => Ok(*b),
            _ if self.input.delimiter == "\\t" => Ok(b'\t'),
            _ => Err(Error::Config(format!(
                "delimiter must be one byte, got `{}`",
                self.input.delimiter
            ))),
        }
    }

    pub fn precision_spec(&self) -> Result<PrecisionSpec> {
        let g = self.schema.targets.len();
        let eps = match &self.precision.cv {
            CvTargets::All(e) => vec![*e; g],
            CvTargets::Each(v) if v.len() == g => v.clone(),
            CvTargets::Each(v) => {
                return Err(Error::Config(format!("{} CV targets for {g} target columns", v.len())));
            }
        };
        PrecisionSpec::with_names(eps, self.schema.targets.clone()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn stages(&self) -> Result<Vec<StageSpec>> {
        match (&self.run.preset, self.stages.is_empty()) {
            (Some(_), false) => Err(Error::Config("give either run.preset or [[stages]], not both".into())),
            (Some(name), true) => preset(name, self.run.mode),
            (None, false) => Ok(self.stages.clone()),
            (None, true) => Err(Error::Config("no stages: set run.preset or add [[stages]]".into())),
        }
    }

    pub fn pipeline(&self) -> Result<PipelineSpec> {
        let spec = PipelineSpec {
            mode: self.run.mode,
            stages: self.stages()?,
            precision: self.precision_spec()?,
            seed: self.run.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.delimiter()?;
        self.precision_spec()?;
        if self.schema.targets.is_empty() {
            return Err(Error::Config("schema names no target columns".into()));
        }
        if self.run.mode == Mode::Atomic && self.schema.auxiliaries.is_empty() {
            return Err(Error::NoAuxiliaries);
        }
        if self.run.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(b) = self.input.derive.iter().find(|b| b.bins == 0) {
            return Err(Error::Config(format!(
                "derived column `{}` needs at least one bin",
                b.name
            )));
        }
        Ok(())
    }

    /// Load the frame named by the config, computing derived columns first.
    pub fn load_frame(&self) -> Result<Frame> {
        let path = &self.input.path;
        let delimiter = self.delimiter()?;
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        if self.input.derive.is_empty() {
            return load_frame(file, &self.schema, delimiter);
        }
        let bytes = with_binned_columns(file, delimiter, &self.input.derive)?;
        load_frame(bytes.as_slice(), &self.schema, delimiter)
    }
}

/// Re-emit a delimited table with binned columns appended.
fn with_binned_columns<R: std::io::Read>(source: R, delimiter: u8, derive: &[BinnedColumn]) -> Result<Vec<u8>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    let mut extra = Vec::new();
    for b in derive {
        let col = header
            .iter()
            .position(|h| h == b.source)
            .ok_or_else(|| Error::MissingColumn {
                column: b.source.clone(),
            })?;
        let values = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let raw = r.get(col).unwrap_or("");
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row: i + 1,
                        column: b.source.clone(),
                        value: raw.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        extra.push(quantile_bins(&values, b.bins));
    }
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(Vec::new());
    let mut head: Vec<String> = header.iter().map(str::to_string).collect();
    head.extend(derive.iter().map(|b| b.name.clone()));
    writer.write_record(&head)?;
    for (i, r) in rows.iter().enumerate() {
        let mut rec: Vec<String> = r.iter().map(str::to_string).collect();
        rec.extend(extra.iter().map(|col| col[i].to_string()));
        writer.write_record(&rec)?;
    }
    writer.into_inner().map_err(|e| Error::Internal(e.to_string()))
}
