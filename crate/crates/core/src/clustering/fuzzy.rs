use rand::Rng;

use super::{check_features, sq_dist, ClusterAssignment, MembershipMatrix};
use crate::rng;
use crate::strata::FeatureMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FuzzyFit {
    pub membership: MembershipMatrix,
    pub assignment: ClusterAssignment,
    pub centroids: Vec<Vec<f64>>,
    /// `Σ u^m d²` at each membership iterate with its own centroids.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

fn centroids(features: &FeatureMatrix, u: &[f64], k: usize, m: f64) -> Vec<Vec<f64>> {
    let mut num = vec![vec![0.0; features.cols()]; k];
    let mut den = vec![0.0; k];
    for (j, y) in features.iter_rows().enumerate() {
        for c in 0..k {
            let w = u[j * k + c].powf(m);
            den[c] += w;
            for (acc, v) in num[c].iter_mut().zip(y) {
                *acc += w * v;
            }
        }
    }
    num.into_iter()
        .zip(den)
        .map(|(s, d)| s.into_iter().map(|v| v / d).collect())
        .collect()
}

fn objective(features: &FeatureMatrix, u: &[f64], v: &[Vec<f64>], m: f64) -> f64 {
    let k = v.len();
    features
        .iter_rows()
        .enumerate()
        .map(|(j, y)| (0..k).map(|c| u[j * k + c].powf(m) * sq_dist(y, &v[c])).sum::<f64>())
        .sum()
}

/// Memberships of one point given its squared distances to each centroid.
pub(crate) fn memberships_of(d2: &[f64], m: f64) -> Vec<f64> {
    if let Some(hit) = d2.iter().position(|&d| d == 0.0) {
        let mut u = vec![0.0; d2.len()];
        u[hit] = 1.0;
        return u;
    }
    let p = 1.0 / (m - 1.0);
    d2.iter()
        .map(|&di| 1.0 / d2.iter().map(|&dq| ((di.ln() - dq.ln()) * p).exp()).sum::<f64>())
        .collect()
}

/// Fuzzy c-means with fuzzifier `m`.
///
/// Memberships start random and row-normalised; centroid and membership
/// updates alternate until no membership changes by `eps` or more, or
/// `max_iter` rounds pass.
pub fn fuzzy_cmeans(
    features: &FeatureMatrix,
    k: usize,
    m: f64,
    max_iter: usize,
    eps: f64,
    seed: u64,
) -> Result<FuzzyFit> {
    check_features(features)?;
    let n = features.rows();
    if !(m > 1.0) {
        return Err(Error::param(format!("fuzzifier must exceed 1, got {m}")));
    }
    if k < 2 || k > n {
        return Err(Error::param(format!("fuzzy c-means needs 2 <= k <= {n}, got {k}")));
    }
    let mut rng = rng::stream(seed, rng::stream_id(&[0x6663, k as u64]));
    let mut u: Vec<f64> = Vec::with_capacity(n * k);
    for _ in 0..n {
        let row: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = row.iter().sum();
        u.extend(row.iter().map(|x| x / s));
    }
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut v = centroids(features, &u, k, m);
    for _ in 0..max_iter.max(1) {
        trace.push(objective(features, &u, &v, m));
        iterations += 1;
        let next: Vec<f64> = features
            .iter_rows()
            .flat_map(|y| memberships_of(&v.iter().map(|c| sq_dist(y, c)).collect::<Vec<_>>(), m))
            .collect();
        let change = u.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u = next;
        v = centroids(features, &u, k, m);
        if change < eps {
            break;
        }
    }
    trace.push(objective(features, &u, &v, m));
    let membership = MembershipMatrix::from_data(n, k, u);
    Ok(FuzzyFit {
        assignment: membership.hard_assignment(),
        membership,
        centroids: v,
        objective: trace,
        iterations,
    })
}
