use super::{em_gmm, fuzzy_cmeans, kmeans_best_of, neural_gas, som_train, ClusterAssignment, Codebook};
use super::{NeuralGasParams, SomParams};
use crate::strata::{FeatureMatrix, Partition};
use crate::{rng, Result};

/// Independent k-means starts tried when k-means clusters prototypes or
/// seeds EM.
pub const RESTARTS: usize = 10;

/// Prototype abstraction run first.
#[derive(Debug, Clone, PartialEq)]
pub enum PrototypeStage {
    Som(SomParams),
    NeuralGas(NeuralGasParams),
}

/// Clusterer applied to the prototypes.
#[derive(Debug, Clone, PartialEq)]
pub enum PrototypeClusterer {
    KMeans {
        k: usize,
        max_iter: usize,
    },
    Em {
        k: usize,
        max_iter: usize,
        tol: f64,
    },
    Fuzzy {
        k: usize,
        m: f64,
        max_iter: usize,
        eps: f64,
    },
}

impl PrototypeClusterer {
    pub fn k(&self) -> usize {
        match *self {
            PrototypeClusterer::KMeans { k, .. }
            | PrototypeClusterer::Em { k, .. }
            | PrototypeClusterer::Fuzzy { k, .. } => k,
        }
    }

    /// Cluster `features` directly with this method. K-means, alone or as the
    /// EM start, keeps the best of [`RESTARTS`] seeded runs.
    pub fn run(&self, features: &FeatureMatrix, seed: u64) -> Result<ClusterAssignment> {
        let k = self.k().min(features.rows());
        if k <= 1 {
            return Ok(Partition::single(features.rows()));
        }
        Ok(match *self {
            PrototypeClusterer::KMeans { max_iter, .. } => {
                kmeans_best_of(features, k, seed, max_iter, RESTARTS)?.assignment
            }
            PrototypeClusterer::Em { max_iter, tol, .. } => {
                let init = kmeans_best_of(features, k, seed, max_iter.max(100), RESTARTS)?.assignment;
                em_gmm(features, init.num_groups(), &init, max_iter, tol)?.assignment
            }
            PrototypeClusterer::Fuzzy { m, max_iter, eps, .. } => {
                fuzzy_cmeans(features, k, m, max_iter, eps, seed)?.assignment
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct TwoStageFit {
    pub assignment: ClusterAssignment,
    pub codebook: Codebook,
    /// Prototype index of every row.
    pub bmu: Vec<usize>,
}

/// Abstract the rows into prototypes, cluster the prototypes that at least
/// one row maps to, and give each row the label of its prototype.
///
/// Used prototypes are ordered by the first row mapping to them, so the
/// second stage sees the same input whatever the codebook layout.
pub fn two_stage(
    features: &FeatureMatrix,
    stage1: &PrototypeStage,
    stage2: &PrototypeClusterer,
    seed: u64,
) -> Result<TwoStageFit> {
    let (codebook, bmu) = match stage1 {
        PrototypeStage::Som(p) => {
            let fit = som_train(features, p)?;
            (fit.codebook, fit.bmu)
        }
        PrototypeStage::NeuralGas(p) => {
            let fit = neural_gas(features, p)?;
            (
                Codebook {
                    weights: fit.state.weights,
                    grid: None,
                },
                fit.bmu,
            )
        }
    };
    let mut used = Vec::new();
    let mut slot = vec![usize::MAX; codebook.len()];
    for &b in &bmu {
        if slot[b] == usize::MAX {
            slot[b] = used.len();
            used.push(b);
        }
    }
    let prototypes = FeatureMatrix::from_rows(&used.iter().map(|&b| codebook.weights[b].clone()).collect::<Vec<_>>())?;
    let proto_labels = stage2.run(&prototypes, rng::stream_id(&[seed, 2]))?;
    let rows: Vec<usize> = bmu.iter().map(|&b| slot[b]).collect();
    let assignment = Partition::from_labels(&rows).coarsen(proto_labels.labels());
    Ok(TwoStageFit {
        assignment,
        codebook,
        bmu,
    })
}
