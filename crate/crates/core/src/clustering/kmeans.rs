use super::{check_features, nearest, sample_rows, sq_dist, ClusterAssignment};
use crate::rng;
use crate::strata::{FeatureMatrix, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub assignment: ClusterAssignment,
    pub centroids: Vec<Vec<f64>>,
    pub sse: f64,
    /// SSE after each accepted pass, Lloyd iterations first, then
    /// single-point transfer sweeps.
    pub sse_trace: Vec<f64>,
}

/// Within-cluster sum of squared Euclidean distances to the cluster means.
pub fn sse(features: &FeatureMatrix, labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let centroids = centroids_of(features, labels, k, &vec![vec![0.0; features.cols()]; k]);
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(features.row(i), &centroids[l]))
        .sum()
}

/// Means of each cluster; empty clusters keep `previous`.
fn centroids_of(features: &FeatureMatrix, labels: &[usize], k: usize, previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = features.cols();
    let mut sums = vec![vec![0.0; cols]; k];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(features.row(i)) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .enumerate()
        .map(|(c, (s, n))| {
            if n == 0 {
                previous[c].clone()
            } else {
                s.into_iter().map(|v| v / n as f64).collect()
            }
        })
        .collect()
}

fn total_sse(features: &FeatureMatrix, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(features.row(i), &centroids[l]))
        .sum()
}

/// Hartigan-Wong style k-means.
///
/// Starts from `k` distinct rows drawn with the seeded stream, runs
/// nearest-centroid reassignment with centroid updates until no row moves or
/// the SSE rises (the rising step is undone), then sweeps single-point
/// transfers: a row leaves cluster `l` for `j` whenever
/// `n_j/(n_j+1)·d²(x,c_j) < n_l/(n_l−1)·d²(x,c_l)`, i.e. whenever the move
/// lowers the SSE, even if the row is already closest to its own centroid.
pub fn kmeans_hw(features: &FeatureMatrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansFit> {
    check_features(features)?;
    let n = features.rows();
    if k == 0 || k > n {
        return Err(Error::param(format!("k-means needs 1 <= k <= {n}, got {k}")));
    }
    let mut rng = rng::stream(seed, rng::stream_id(&[0x6b6d, k as u64]));
    let mut centroids = sample_rows(features, k, &mut rng);
    let assign = |centroids: &[Vec<f64>]| -> Vec<usize> {
        features
            .iter_rows()
            .map(|x| nearest(centroids.iter().map(Vec::as_slice), x).0)
            .collect()
    };

    let mut labels = assign(&centroids);
    centroids = centroids_of(features, &labels, k, &centroids);
    let mut current = total_sse(features, &labels, &centroids);
    let mut sse_trace = vec![current];
    for _ in 1..max_iter.max(1) {
        let next_labels = assign(&centroids);
        if next_labels == labels {
            break;
        }
        let next_centroids = centroids_of(features, &next_labels, k, &centroids);
        let next_sse = total_sse(features, &next_labels, &next_centroids);
        if next_sse > current {
            break;
        }
        labels = next_labels;
        centroids = next_centroids;
        current = next_sse;
        sse_trace.push(current);
    }

    // Transfer sweeps.
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    for _ in 0..max_iter.max(1) {
        let mut moved = false;
        for i in 0..n {
            let x = features.row(i);
            let from = labels[i];
            if sizes[from] <= 1 {
                continue;
            }
            let nf = sizes[from] as f64;
            let leave = nf / (nf - 1.0) * sq_dist(x, &centroids[from]);
            let mut best = (from, leave);
            for (j, c) in centroids.iter().enumerate() {
                if j == from {
                    continue;
                }
                let nj = sizes[j] as f64;
                let join = if sizes[j] == 0 {
                    0.0
                } else {
                    nj / (nj + 1.0) * sq_dist(x, c)
                };
                if join < best.1 {
                    best = (j, join);
                }
            }
            // Relative margin keeps rounding from cycling a point back and forth.
            if best.0 != from && best.1 < leave * (1.0 - 1e-12) {
                let to = best.0;
                let nt = sizes[to] as f64;
                for g in 0..x.len() {
                    centroids[from][g] = (centroids[from][g] * nf - x[g]) / (nf - 1.0);
                    centroids[to][g] = if sizes[to] == 0 {
                        x[g]
                    } else {
                        (centroids[to][g] * nt + x[g]) / (nt + 1.0)
                    };
                }
                sizes[from] -= 1;
                sizes[to] += 1;
                labels[i] = to;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        // Refresh from scratch to shed drift from the incremental updates.
        centroids = centroids_of(features, &labels, k, &centroids);
        current = total_sse(features, &labels, &centroids);
        sse_trace.push(current);
    }

    let assignment = Partition::from_labels(&labels);
    let mut order = Vec::new();
    for &l in &labels {
        if !order.contains(&l) {
            order.push(l);
        }
    }
    let centroids = order.into_iter().map(|l| centroids[l].clone()).collect();
    Ok(KMeansFit {
        assignment,
        centroids,
        sse: current,
        sse_trace,
    })
}

/// Best of `restarts` independent k-means runs by SSE (first wins ties).
pub fn kmeans_best_of(
    features: &FeatureMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
) -> Result<KMeansFit> {
    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts.max(1) {
        let fit = kmeans_hw(features, k, rng::stream_id(&[seed, r as u64]), max_iter)?;
        if best.as_ref().is_none_or(|b| fit.sse < b.sse) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}
