use super::kmeans::kmeans_hw;
use super::ClusterAssignment;
use crate::allocation::{bethel_allocate, AllocationOptions, PrecisionSpec};
use crate::strata::{standardize_features, summarize, DomainStrata, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub assignment: ClusterAssignment,
    pub k: usize,
    pub cost: f64,
    /// `(k, cost)` for every cluster count tried.
    pub curve: Vec<(usize, f64)>,
}

/// Run k-means for every `k` in `1..=min(k_max, N)` on one domain and keep the
/// assignment with the smallest allocation cost, ties to the smaller `k`.
///
/// Each `k` uses its own random stream derived from `seed`, so the curve does
/// not depend on which other values of `k` were tried.
pub fn kmeans_scan(
    domain: &DomainStrata,
    k_max: usize,
    seed: u64,
    max_iter: usize,
    spec: &PrecisionSpec,
    opts: &AllocationOptions,
) -> Result<ScanResult> {
    if k_max < 2 {
        return Err(Error::param(format!(
            "k-means scan needs a maximum of at least 2 clusters, got {k_max}"
        )));
    }
    let cost_of =
        |p: &Partition| -> Result<f64> { Ok(bethel_allocate(&summarize(&domain.strata, p)?, spec, opts)?.total) };
    let single = Partition::single(domain.len());
    let mut best = ScanResult {
        cost: cost_of(&single)?,
        assignment: single,
        k: 1,
        curve: Vec::new(),
    };
    best.curve.push((1, best.cost));
    if domain.len() < 2 {
        return Ok(best);
    }
    let features = standardize_features(&domain.strata)?;
    for k in 2..=k_max.min(domain.len()) {
        let fit = kmeans_hw(&features, k, seed, max_iter)?;
        let cost = cost_of(&fit.assignment)?;
        best.curve.push((k, cost));
        if cost < best.cost {
            best.cost = cost;
            best.k = fit.assignment.num_groups();
            best.assignment = fit.assignment;
        }
    }
    Ok(best)
}
