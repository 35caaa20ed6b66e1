use rand::Rng;

use super::{check_features, nearest, sample_rows, ClusterAssignment};
use crate::rng;
use crate::strata::{FeatureMatrix, Partition};
use crate::{Error, Result};

/// Prototype vectors, optionally laid out on a rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub weights: Vec<Vec<f64>>,
    pub grid: Option<(usize, usize)>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(row, col)` of a node on the grid.
    pub fn coords(&self, node: usize) -> Option<(usize, usize)> {
        self.grid.map(|(_, cols)| (node / cols, node % cols))
    }

    /// Closest prototype to `x`, ties to the lowest index.
    pub fn best_match(&self, x: &[f64]) -> usize {
        nearest(self.weights.iter().map(Vec::as_slice), x).0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SomParams {
    pub rows: usize,
    pub cols: usize,
    pub iterations: usize,
    pub alpha_hi: f64,
    pub alpha_lo: f64,
    /// Starting neighbourhood radius in grid units.
    pub radius: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SomFit {
    pub codebook: Codebook,
    /// Best-matching node of every row.
    pub bmu: Vec<usize>,
    pub assignment: ClusterAssignment,
}

/// Grid sides with `rows·cols ≈ 5·√n`, at least `min_nodes` (and 2) nodes, and
/// as square as possible.
pub fn default_grid_size(n: usize, min_nodes: usize) -> (usize, usize) {
    let target = ((5.0 * (n as f64).sqrt()).round() as usize).max(min_nodes).max(2);
    let rows = ((target as f64).sqrt().round() as usize).max(1);
    let cols = target.div_ceil(rows);
    (rows, cols)
}

/// Self-organising map on a rectangular grid with a bubble neighbourhood.
///
/// At step `s` of `iterations` one random row is drawn, its best-matching
/// node found, and every node within grid distance `r(s)` of it moves by
/// `α(s)·(x − w)`. `α` falls linearly from `alpha_hi` to `alpha_lo`; `r` falls
/// linearly from `radius` to 1, or stays at `radius` when that is below 1 so
/// only the winner moves.
pub fn som_train(features: &FeatureMatrix, p: &SomParams) -> Result<SomFit> {
    check_features(features)?;
    let nodes = p.rows * p.cols;
    if nodes < 2 {
        return Err(Error::param(format!(
            "SOM grid {}x{} has fewer than 2 nodes",
            p.rows, p.cols
        )));
    }
    if !(p.alpha_lo > 0.0 && p.alpha_lo <= p.alpha_hi && p.alpha_hi <= 1.0) {
        return Err(Error::param(format!(
            "SOM learning rates need 0 < alpha_lo <= alpha_hi <= 1, got {} and {}",
            p.alpha_lo, p.alpha_hi
        )));
    }
    if p.iterations == 0 || !(p.radius >= 0.0) {
        return Err(Error::param(
            "SOM needs at least one iteration and a non-negative radius",
        ));
    }
    let mut rng = rng::stream(p.seed, rng::stream_id(&[0x736f6d, p.rows as u64, p.cols as u64]));
    let mut weights = sample_rows(features, nodes, &mut rng);
    let coord = |i: usize| ((i / p.cols) as f64, (i % p.cols) as f64);
    let steps = p.iterations as f64;
    for s in 0..p.iterations {
        let frac = s as f64 / steps;
        let alpha = p.alpha_hi - (p.alpha_hi - p.alpha_lo) * frac;
        let radius = if p.radius > 1.0 {
            p.radius - (p.radius - 1.0) * frac
        } else {
            p.radius
        };
        let x = features.row(rng.random_range(0..features.rows()));
        let winner = nearest(weights.iter().map(Vec::as_slice), x).0;
        let (wr, wc) = coord(winner);
        for (node, w) in weights.iter_mut().enumerate() {
            let (r, c) = coord(node);
            if node == winner || ((r - wr).powi(2) + (c - wc).powi(2)).sqrt() <= radius {
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += alpha * (xj - *wj);
                }
            }
        }
    }
    let codebook = Codebook {
        weights,
        grid: Some((p.rows, p.cols)),
    };
    let bmu: Vec<usize> = features.iter_rows().map(|x| codebook.best_match(x)).collect();
    Ok(SomFit {
        assignment: Partition::from_labels(&bmu),
        codebook,
        bmu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(rows: usize, cols: usize, iterations: usize, radius: f64) -> SomParams {
        SomParams {
            rows,
            cols,
            iterations,
            alpha_hi: 0.5,
            alpha_lo: 0.01,
            radius,
            seed: 3,
        }
    }

    #[test]
    fn two_points_get_two_nodes() {
        let f = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![5.0, 5.0]]).unwrap();
        let fit = som_train(&f, &params(1, 2, 500, 0.5)).unwrap();
        assert_ne!(fit.bmu[0], fit.bmu[1]);
        assert_eq!(fit.assignment.num_groups(), 2);
    }

    #[test]
    fn grid_size_tracks_root_n() {
        assert_eq!(default_grid_size(100, 0), (7, 8));
        let (r, c) = default_grid_size(4, 30);
        assert!(r * c >= 30);
    }

    #[test]
    fn small_radius_moves_only_the_winner() {
        let f = FeatureMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let fit = som_train(&f, &params(1, 5, 1, 0.9)).unwrap();
        // both starting nodes came from rows equal to 1.0 so only count moved
        assert!(fit.codebook.weights.iter().all(|w| w[0] == 1.0));
        let g = FeatureMatrix::from_rows(&[vec![0.0], vec![10.0], vec![20.0]]).unwrap();
        let before = {
            let mut r = rng::stream(3, rng::stream_id(&[0x736f6d, 1, 3]));
            sample_rows(&g, 3, &mut r)
        };
        let after = som_train(&g, &params(1, 3, 1, 0.9)).unwrap().codebook.weights;
        let moved = before.iter().zip(&after).filter(|(a, b)| a != b).count();
        assert!(moved <= 1);
    }

    #[test]
    fn rejects_bad_rates() {
        let f = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let mut p = params(1, 2, 10, 1.0);
        p.alpha_lo = 0.9;
        assert!(som_train(&f, &p).is_err());
    }

    proptest! {
        #[test]
        fn weights_stay_inside_the_data_box(
            pts in prop::collection::vec([-5.0f64..5.0, -5.0f64..5.0], 2..30),
            seed in any::<u64>(),
            radius in 0.0f64..4.0,
        ) {
            let f = FeatureMatrix::from_rows(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap();
            let p = SomParams { seed, ..params(3, 3, 300, radius) };
            let fit = som_train(&f, &p).unwrap();
            for j in 0..2 {
                let lo = pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
                for w in &fit.codebook.weights {
                    prop_assert!(w[j] >= lo - 0.1 && w[j] <= hi + 0.1);
                }
            }
        }
    }
}
