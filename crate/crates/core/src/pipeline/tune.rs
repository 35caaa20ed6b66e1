use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::run::run_on_strata;
use super::spec::{ParamMap, PipelineSpec, StageKind};
use crate::strata::BasicStrata;
use crate::{rng, Error, Result};

/// Sampling range of one tunable parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ParamRange {
    Real { lo: f64, hi: f64 },
    Int { lo: i64, hi: i64 },
    Choice { values: Vec<f64> },
}

impl ParamRange {
    fn check(&self, name: &str) -> Result<()> {
        let ok = match self {
            ParamRange::Real { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            ParamRange::Int { lo, hi } => lo <= hi,
            ParamRange::Choice { values } => !values.is_empty(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("empty search range for `{name}`")))
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ParamRange::Real { lo, hi } if lo == hi => *lo,
            ParamRange::Real { lo, hi } => rng.random_range(*lo..*hi),
            ParamRange::Int { lo, hi } => rng.random_range(*lo..=*hi) as f64,
            ParamRange::Choice { values } => values[rng.random_range(0..values.len())],
        }
    }
}

/// Tunable parameters and their ranges, keyed by parameter name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSpace {
    pub params: BTreeMap<String, ParamRange>,
}

const PAIRS: [(&str, &str); 3] = [
    ("alpha_hi", "alpha_lo"),
    ("lambda_hi", "lambda_lo"),
    ("eps_hi", "eps_lo"),
];

impl ParamSpace {
    /// Default ranges for the tunables of `kind`: SOM iterations, learning
    /// rates and radius; neural-gas range and step size; the fuzzifier.
    pub fn default_for(kind: StageKind) -> Self {
        use StageKind::*;
        let mut params = BTreeMap::new();
        let mut real = |k: &str, lo: f64, hi: f64| {
            params.insert(k.to_string(), ParamRange::Real { lo, hi });
        };
        if matches!(kind, Som | SomKm | SomEm | SomFc) {
            real("alpha_hi", 0.01, 1.0);
            real("alpha_lo", 0.001, 0.1);
            real("radius", 0.0, 3.0);
        }
        if matches!(kind, Ng | NgKm | NgEm | NgFc) {
            real("lambda_hi", 1.0, 30.0);
            real("lambda_lo", 0.01, 1.0);
            real("eps_hi", 0.05, 1.0);
            real("eps_lo", 0.001, 0.1);
        }
        if matches!(kind, Fc | SomFc | NgFc) {
            real("m", 1.5, 4.0);
        }
        if matches!(kind, Som | SomKm | SomEm | SomFc) {
            params.insert("iterations".into(), ParamRange::Int { lo: 100, hi: 10_000 });
        }
        ParamSpace { params }
    }

    /// Draw one vector; hi/lo pairs are swapped into order when drawn inverted.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> ParamMap {
        let mut out: ParamMap = self.params.iter().map(|(k, r)| (k.clone(), r.sample(rng))).collect();
        for (hi, lo) in PAIRS {
            if let (Some(&h), Some(&l)) = (out.get(hi), out.get(lo)) {
                if h < l {
                    out.insert(hi.into(), l);
                    out.insert(lo.into(), h);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub params: ParamMap,
    /// `None` when the trial failed.
    pub sample_size: Option<f64>,
    pub error: Option<String>,
    pub stage_times: Vec<f64>,
    pub total_time: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub trials: Vec<TrialRecord>,
    /// Index of the best trial.
    pub best: usize,
    /// The template with the best trial's parameters applied.
    pub best_spec: PipelineSpec,
}

impl TuneOutcome {
    pub fn best_trial(&self) -> &TrialRecord {
        &self.trials[self.best]
    }
}

/// Apply sampled parameters to every stage that reads them.
pub fn apply_params(template: &PipelineSpec, params: &ParamMap) -> PipelineSpec {
    let mut spec = template.clone();
    for stage in &mut spec.stages {
        let keys = stage.kind.param_keys();
        for (k, &v) in params {
            if keys.contains(&k.as_str()) {
                stage.params.insert(k.clone(), v);
            }
        }
    }
    spec
}

/// Uniform random search over `space`.
///
/// Trial `i` draws its parameters from stream `i` of `seed` and runs the
/// template pipeline (with the template's own seed) on `strata`. Trials run
/// in parallel and are logged in index order. The best trial has the smallest
/// sample size, ties to the earliest; failed trials are logged and skipped.
pub fn random_search_tune(
    strata: &BasicStrata,
    template: &PipelineSpec,
    space: &ParamSpace,
    budget: usize,
    seed: u64,
) -> Result<TuneOutcome> {
    if budget == 0 {
        return Err(Error::Config("tuning budget must be at least 1".into()));
    }
    template.validate()?;
    for (name, r) in &space.params {
        r.check(name)?;
    }
    let trials: Vec<TrialRecord> = (0..budget)
        .into_par_iter()
        .map(|index| {
            let mut r = rng::stream(seed, rng::stream_id(&[0x74756e65, index as u64]));
            let params = space.sample(&mut r);
            let spec = apply_params(template, &params);
            let start = Instant::now();
            let result = run_on_strata(strata.clone(), &spec);
            let total_time = start.elapsed().as_secs_f64();
            match result {
                Ok(out) => TrialRecord {
                    index,
                    params,
                    sample_size: Some(out.sample_size()),
                    error: None,
                    stage_times: out.stages.iter().map(|s| s.report.time_s).collect(),
                    total_time,
                    seed: template.seed,
                },
                Err(e) => TrialRecord {
                    index,
                    params,
                    sample_size: None,
                    error: Some(e.to_string()),
                    stage_times: Vec::new(),
                    total_time,
                    seed: template.seed,
                },
            }
        })
        .collect();
    let best = trials
        .iter()
        .filter_map(|t| t.sample_size.map(|s| (t.index, s)))
        .fold(None, |acc: Option<(usize, f64)>, (i, s)| match acc {
            Some((_, b)) if b <= s => acc,
            _ => Some((i, s)),
        })
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::Config(format!(
                "all {budget} tuning trials failed; first error: {}",
                trials[0].error.as_deref().unwrap_or("unknown")
            ))
        })?;
    let best_spec = apply_params(template, &trials[best].params);
    Ok(TuneOutcome {
        trials,
        best,
        best_spec,
    })
}
