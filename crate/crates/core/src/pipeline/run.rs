use std::time::Instant;

use rayon::prelude::*;

use super::spec::{Mode, PipelineSpec, StageKind, StageSpec};
use crate::allocation::{evaluate_cost, AllocationOptions, CostReport, PrecisionSpec};
use crate::clustering::{
    default_grid_size, em_gmm, fuzzy_cmeans, kmeans_hw, kmeans_scan, neural_gas, som_train, two_stage, NeuralGasParams,
    PrototypeClusterer, PrototypeStage, SomParams,
};
use crate::local_search::{hill_climb, HillClimbOptions, TracePoint};
use crate::strata::{
    build_atomic_strata, build_continuous_strata, standardize_features, BasicStrata, DomainStrata, FeatureMatrix,
    Frame, Partition, Stratification,
};
use crate::{rng, Error, Result};

/// One row of the stage table.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    /// 1-based stage position.
    pub stage: usize,
    pub kind: StageKind,
    pub sample_size: f64,
    pub strata: usize,
    pub time_s: f64,
    pub cumulative_s: f64,
}

#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub report: StageReport,
    pub stratification: Stratification,
    pub cost: CostReport,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub strata: BasicStrata,
    pub stages: Vec<StageOutcome>,
    /// Hill-climbing trace, empty when the pipeline has no climb.
    pub trace: Vec<TracePoint>,
}

impl PipelineOutcome {
    pub fn last(&self) -> &StageOutcome {
        self.stages.last().expect("validated pipelines have a stage")
    }

    pub fn sample_size(&self) -> f64 {
        self.last().cost.total
    }

    pub fn reports(&self) -> Vec<StageReport> {
        self.stages.iter().map(|s| s.report.clone()).collect()
    }
}

/// Build basic strata for `spec.mode` and run the pipeline on them.
pub fn run_pipeline(frame: &Frame, spec: &PipelineSpec) -> Result<PipelineOutcome> {
    let strata = match spec.mode {
        Mode::Atomic => build_atomic_strata(frame)?,
        Mode::Continuous => build_continuous_strata(frame)?,
    };
    run_on_strata(strata, spec)
}

/// Run every stage in order. Clustering stages work domain by domain in
/// parallel, each domain with its own random stream; the hill climb is one
/// search over all domains.
pub fn run_on_strata(strata: BasicStrata, spec: &PipelineSpec) -> Result<PipelineOutcome> {
    spec.validate()?;
    if spec.precision.len() != strata.num_targets() {
        return Err(Error::Config(format!(
            "{} precision targets for {} target variables",
            spec.precision.len(),
            strata.num_targets()
        )));
    }
    let opts = AllocationOptions::default();
    let mut stages: Vec<StageOutcome> = Vec::new();
    let mut trace = Vec::new();
    let mut cumulative = 0.0;
    for (i, stage) in spec.stages.iter().enumerate() {
        let wrap = |e: Error| Error::Stage {
            stage: i + 1,
            algorithm: stage.kind.name().to_string(),
            source: Box::new(e),
        };
        let start = Instant::now();
        let incoming = stages.last().map(|s| &s.stratification);
        let stage_seed = rng::stream_id(&[spec.seed, i as u64]);
        let (stratification, cost) = if stage.kind == StageKind::HillClimb {
            let initial = incoming.expect("validated: a clusterer precedes the climb");
            let options = HillClimbOptions {
                stall_limit: stage.count_or("stall_limit", 1000).map_err(wrap)?,
                max_iterations: stage.count("max_iterations").map_err(wrap)?.map(|m| m as u64),
                allocation: opts,
            };
            let out = hill_climb(&strata, initial, &spec.precision, &options, stage_seed).map_err(wrap)?;
            trace = out.trace;
            (out.stratification, out.cost)
        } else {
            let domains = strata
                .domains
                .par_iter()
                .enumerate()
                .map(|(d, domain)| {
                    let seed = rng::stream_id(&[stage_seed, d as u64]);
                    let prior = incoming.map(|s| &s.domains[d]);
                    cluster_domain(stage, domain, prior, &spec.precision, &opts, seed)
                })
                .collect::<Result<Vec<_>>>()
                .map_err(wrap)?;
            let s = Stratification { domains };
            let cost = evaluate_cost(&strata, &s, &spec.precision, &opts).map_err(wrap)?;
            (s, cost)
        };
        let time_s = start.elapsed().as_secs_f64();
        cumulative += time_s;
        stages.push(StageOutcome {
            report: StageReport {
                stage: i + 1,
                kind: stage.kind,
                sample_size: cost.total,
                strata: stratification.num_strata(),
                time_s,
                cumulative_s: cumulative,
            },
            stratification,
            cost,
        });
    }
    Ok(PipelineOutcome { strata, stages, trace })
}

/// Cluster count used when a stage does not set `k`: the incoming stratum
/// count, or else the k-means scan's choice. Also returns the scan's
/// assignment so EM can start from it.
fn auto_k(
    stage: &StageSpec,
    domain: &DomainStrata,
    incoming: Option<&Partition>,
    spec: &PrecisionSpec,
    opts: &AllocationOptions,
    seed: u64,
) -> Result<(usize, Option<Partition>)> {
    if let Some(k) = stage.count("k")? {
        return Ok((k, None));
    }
    if let Some(p) = incoming {
        return Ok((p.num_groups(), Some(p.clone())));
    }
    let scan = kmeans_scan(
        domain,
        stage.count_or("k_max", 30)?,
        seed,
        stage.count_or("max_iter", 100)?,
        spec,
        opts,
    )?;
    Ok((scan.k, Some(scan.assignment)))
}

fn som_params(stage: &StageSpec, n: usize, min_nodes: usize, seed: u64) -> Result<SomParams> {
    let (rows, cols) = default_grid_size(n, min_nodes);
    let rows = stage.count_or("rows", rows)?;
    let cols = stage.count_or("cols", cols)?;
    Ok(SomParams {
        rows,
        cols,
        iterations: stage.count_or("iterations", 1000)?,
        alpha_hi: stage.real_or("alpha_hi", 0.5),
        alpha_lo: stage.real_or("alpha_lo", 0.01),
        radius: stage.real_or("radius", rows.max(cols) as f64 / 2.0),
        seed,
    })
}

fn ng_params(stage: &StageSpec, k: usize, n: usize, seed: u64) -> Result<NeuralGasParams> {
    Ok(NeuralGasParams {
        k,
        lambda_hi: stage.real_or("lambda_hi", (k as f64 / 2.0).max(1.0)),
        lambda_lo: stage.real_or("lambda_lo", 0.01),
        eps_hi: stage.real_or("eps_hi", 0.5),
        eps_lo: stage.real_or("eps_lo", 0.005),
        iterations: stage.count_or("iterations", 10_000)?,
        age_limit: Some(stage.count_or("age_limit", 2 * n)?),
        seed,
    })
}

fn second_stage(stage: &StageSpec, k: usize) -> Result<PrototypeClusterer> {
    use StageKind::*;
    Ok(match stage.kind {
        Km | SomKm | NgKm => PrototypeClusterer::KMeans {
            k,
            max_iter: stage.count_or("max_iter", 100)?,
        },
        Em | SomEm | NgEm => PrototypeClusterer::Em {
            k,
            max_iter: stage.count_or("max_iter", 200)?,
            tol: stage.real_or("tol", 1e-8),
        },
        _ => PrototypeClusterer::Fuzzy {
            k,
            m: stage.real_or("m", 2.0),
            max_iter: stage.count_or("max_iter", 300)?,
            eps: stage.real_or("eps", 1e-6),
        },
    })
}

fn cluster_domain(
    stage: &StageSpec,
    domain: &DomainStrata,
    incoming: Option<&Partition>,
    spec: &PrecisionSpec,
    opts: &AllocationOptions,
    seed: u64,
) -> Result<Partition> {
    use StageKind::*;
    let n = domain.len();
    if n < 2 {
        return Ok(Partition::single(n));
    }
    let features: FeatureMatrix = standardize_features(&domain.strata)?;
    let max_iter = |default| stage.count_or("max_iter", default);
    Ok(match stage.kind {
        KmScan => kmeans_scan(domain, stage.count_or("k_max", 30)?, seed, max_iter(100)?, spec, opts)?.assignment,
        Km => {
            let (k, _) = auto_k(stage, domain, incoming, spec, opts, seed)?;
            kmeans_hw(&features, k.clamp(1, n), seed, max_iter(100)?)?.assignment
        }
        Em => {
            let (k, start) = auto_k(stage, domain, incoming, spec, opts, seed)?;
            let k = k.clamp(1, n);
            let init = match start {
                Some(p) if p.num_groups() == k => p,
                _ => kmeans_hw(&features, k, seed, 100)?.assignment,
            };
            em_gmm(&features, k, &init, max_iter(200)?, stage.real_or("tol", 1e-8))?.assignment
        }
        Fc => {
            let (k, _) = auto_k(stage, domain, incoming, spec, opts, seed)?;
            let k = k.min(n);
            if k < 2 {
                Partition::single(n)
            } else {
                fuzzy_cmeans(
                    &features,
                    k,
                    stage.real_or("m", 2.0),
                    max_iter(300)?,
                    stage.real_or("eps", 1e-6),
                    seed,
                )?
                .assignment
            }
        }
        Som => som_train(&features, &som_params(stage, n, 2, seed)?)?.assignment,
        Ng => {
            let (k, _) = auto_k(stage, domain, incoming, spec, opts, seed)?;
            let k = k.min(n);
            if k < 2 {
                Partition::single(n)
            } else {
                neural_gas(&features, &ng_params(stage, k, n, seed)?)?.assignment
            }
        }
        SomKm | SomEm | SomFc | NgKm | NgEm | NgFc => {
            let (k, _) = auto_k(stage, domain, incoming, spec, opts, seed)?;
            let stage1 = if matches!(stage.kind, SomKm | SomEm | SomFc) {
                PrototypeStage::Som(som_params(stage, n, k, seed)?)
            } else {
                let default = ((5.0 * (n as f64).sqrt()).round() as usize).max(k).min(n).max(2);
                let prototypes = stage.count_or("prototypes", default)?;
                PrototypeStage::NeuralGas(ng_params(stage, prototypes, n, seed)?)
            };
            two_stage(&features, &stage1, &second_stage(stage, k)?, seed)?.assignment
        }
        HillClimb => unreachable!("hill climbing is not a per-domain stage"),
    })
}
