use rand::Rng;

use super::{check_features, sample_rows, sq_dist, ClusterAssignment};
use crate::rng;
use crate::strata::{FeatureMatrix, Partition};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralGasParams {
    pub k: usize,
    pub lambda_hi: f64,
    pub lambda_lo: f64,
    pub eps_hi: f64,
    pub eps_lo: f64,
    pub iterations: usize,
    /// Edge age limit; `None` uses twice the number of rows.
    pub age_limit: Option<usize>,
    pub seed: u64,
}

/// Prototypes plus the competitive Hebbian graph between them.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralGasState {
    pub weights: Vec<Vec<f64>>,
    pub connected: Vec<Vec<bool>>,
    pub age: Vec<Vec<usize>>,
    pub age_limit: usize,
}

impl NeuralGasState {
    pub fn new(weights: Vec<Vec<f64>>, age_limit: usize) -> Self {
        let k = weights.len();
        NeuralGasState {
            weights,
            connected: vec![vec![false; k]; k],
            age: vec![vec![0; k]; k],
            age_limit,
        }
    }

    /// Prototype indices sorted by distance to `v`, ties by index.
    pub fn ranking(&self, v: &[f64]) -> Vec<usize> {
        let d: Vec<f64> = self.weights.iter().map(|w| sq_dist(w, v)).collect();
        let mut order: Vec<usize> = (0..d.len()).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        order
    }

    /// One adaptation step towards `v`. Returns the step factor
    /// `eps·exp(−rank/lambda)` applied to each prototype.
    pub fn adapt(&mut self, v: &[f64], eps: f64, lambda: f64) -> Vec<f64> {
        let order = self.ranking(v);
        let mut factors = vec![0.0; order.len()];
        for (rank, &i) in order.iter().enumerate() {
            let f = eps * (-(rank as f64) / lambda).exp();
            factors[i] = f;
            for (w, x) in self.weights[i].iter_mut().zip(v) {
                *w += f * (x - *w);
            }
        }
        if order.len() >= 2 {
            let (i0, i1) = (order[0], order[1]);
            self.connected[i0][i1] = true;
            self.connected[i1][i0] = true;
            self.age[i0][i1] = 0;
            self.age[i1][i0] = 0;
            for j in 0..order.len() {
                if self.connected[i0][j] {
                    self.age[i0][j] += 1;
                    self.age[j][i0] = self.age[i0][j];
                    if self.age[i0][j] > self.age_limit {
                        self.connected[i0][j] = false;
                        self.connected[j][i0] = false;
                        self.age[i0][j] = 0;
                        self.age[j][i0] = 0;
                    }
                }
            }
        }
        factors
    }
}

#[derive(Debug, Clone)]
pub struct NeuralGasFit {
    pub state: NeuralGasState,
    /// Closest prototype of every row.
    pub bmu: Vec<usize>,
    pub assignment: ClusterAssignment,
}

/// Neural gas with competitive Hebbian edges.
///
/// Both the neighbourhood range and the step size decay geometrically,
/// `p(s) = p_hi·(p_lo/p_hi)^(s/iterations)`.
pub fn neural_gas(features: &FeatureMatrix, p: &NeuralGasParams) -> Result<NeuralGasFit> {
    check_features(features)?;
    if p.k < 2 {
        return Err(Error::param(format!(
            "neural gas needs at least 2 prototypes, got {}",
            p.k
        )));
    }
    if !(p.lambda_lo > 0.0 && p.lambda_lo <= p.lambda_hi) {
        return Err(Error::param(format!(
            "neural gas needs 0 < lambda_lo <= lambda_hi, got {} and {}",
            p.lambda_lo, p.lambda_hi
        )));
    }
    if !(p.eps_lo > 0.0 && p.eps_lo <= p.eps_hi && p.eps_hi <= 1.0) {
        return Err(Error::param(format!(
            "neural gas needs 0 < eps_lo <= eps_hi <= 1, got {} and {}",
            p.eps_lo, p.eps_hi
        )));
    }
    if p.iterations == 0 {
        return Err(Error::param("neural gas needs at least one iteration"));
    }
    let mut rng = rng::stream(p.seed, rng::stream_id(&[0x6e67, p.k as u64]));
    let weights = sample_rows(features, p.k, &mut rng);
    let mut state = NeuralGasState::new(weights, p.age_limit.unwrap_or(2 * features.rows()));
    let steps = p.iterations as f64;
    for s in 0..p.iterations {
        let t = s as f64 / steps;
        let lambda = p.lambda_hi * (p.lambda_lo / p.lambda_hi).powf(t);
        let eps = p.eps_hi * (p.eps_lo / p.eps_hi).powf(t);
        let v = features.row(rng.random_range(0..features.rows()));
        state.adapt(v, eps, lambda);
    }
    let bmu: Vec<usize> = features.iter_rows().map(|x| state.ranking(x)[0]).collect();
    Ok(NeuralGasFit {
        assignment: Partition::from_labels(&bmu),
        state,
        bmu,
    })
}
