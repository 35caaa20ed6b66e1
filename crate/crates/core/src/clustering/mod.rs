//! Initial-stratification generators.
//!
//! Every clusterer works on one domain's [`FeatureMatrix`] (standardised
//! basic-stratum means) and ends in a hard [`ClusterAssignment`]. Soft methods
//! take the row-wise argmax of their memberships, ties to the lower cluster.

mod em;
mod fuzzy;
mod kmeans;
mod neural_gas;
mod scan;
mod som;
mod two_stage;

pub use em::{em_gmm, GmmFit};
pub use fuzzy::{fuzzy_cmeans, FuzzyFit};
pub use kmeans::{kmeans_best_of, kmeans_hw, sse, KMeansFit};
pub use neural_gas::{neural_gas, NeuralGasFit, NeuralGasParams, NeuralGasState};
pub use scan::{kmeans_scan, ScanResult};
pub use som::{default_grid_size, som_train, Codebook, SomFit, SomParams};
pub use two_stage::{two_stage, PrototypeClusterer, PrototypeStage, TwoStageFit, RESTARTS};

use crate::strata::{FeatureMatrix, Partition};
use crate::{Error, Result};

/// Hard cluster labels, dense and without empty clusters.
pub type ClusterAssignment = Partition;

/// Soft memberships, one row per item, each row summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    rows: usize,
    k: usize,
    data: Vec<f64>,
}

impl MembershipMatrix {
    pub(crate) fn from_data(rows: usize, k: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * k);
        MembershipMatrix { rows, k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn clusters(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_error(&self) -> f64 {
        (0..self.rows)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k];
        for i in 0..self.rows {
            for (s, u) in sums.iter_mut().zip(self.row(i)) {
                *s += u;
            }
        }
        sums
    }

    /// Row-wise argmax, ties to the lowest index, compacted.
    pub fn hard_assignment(&self) -> ClusterAssignment {
        let labels: Vec<usize> = (0..self.rows).map(|i| argmax(self.row(i))).collect();
        Partition::from_labels(&labels)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index and squared distance of the closest prototype, ties to the lowest
/// index.
pub(crate) fn nearest<'a>(prototypes: impl IntoIterator<Item = &'a [f64]>, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in prototypes.into_iter().enumerate() {
        let d = sq_dist(p, x);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub(crate) fn check_features(features: &FeatureMatrix) -> Result<()> {
    if features.rows() == 0 {
        return Err(Error::param("no rows to cluster"));
    }
    if !features.all_finite() {
        return Err(Error::param("features contain non-finite values"));
    }
    Ok(())
}

/// Pick `count` rows as starting prototypes: distinct rows when there are
/// enough, otherwise every row once and the rest drawn with replacement.
pub(crate) fn sample_rows<R: rand::Rng>(features: &FeatureMatrix, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = features.rows();
    let mut idx: Vec<usize> = if count <= n {
        rand::seq::index::sample(rng, n, count).into_vec()
    } else {
        let mut all: Vec<usize> = (0..n).collect();
        all.extend((n..count).map(|_| rng.random_range(0..n)));
        all
    };
    idx.truncate(count);
    idx.into_iter().map(|i| features.row(i).to_vec()).collect()
}
