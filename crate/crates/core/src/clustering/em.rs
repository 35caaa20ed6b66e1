use nalgebra::{DMatrix, DVector};

use super::{check_features, ClusterAssignment, MembershipMatrix};
use crate::strata::FeatureMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GmmFit {
    pub membership: MembershipMatrix,
    pub assignment: ClusterAssignment,
    /// Log-likelihood after every E-step.
    pub log_likelihood: Vec<f64>,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub iterations: usize,
}

struct Component {
    log_weight: f64,
    mean: DVector<f64>,
    /// Lower Cholesky factor of the covariance.
    chol_l: DMatrix<f64>,
    log_det: f64,
}

const LOG_2PI: f64 = 1.837_877_066_409_345_5;

impl Component {
    fn log_density(&self, x: &DVector<f64>) -> f64 {
        let diff = x - &self.mean;
        let y = self
            .chol_l
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor has a positive diagonal");
        -0.5 * (x.len() as f64 * LOG_2PI + self.log_det + y.norm_squared())
    }
}

fn factor(cov: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let chol = cov.clone().cholesky()?;
    let l = chol.l();
    let log_det = 2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>();
    log_det.is_finite().then_some((l, log_det))
}

/// Weighted mean and covariance of every column of `resp`.
///
/// Covariance eigenvalues are lifted to at least `floor`, which is the exact
/// maximiser over covariances with that floor, so EM stays monotone. A
/// component with no weight or an unfactorable covariance is dropped.
fn m_step(rows: &[DVector<f64>], resp: &[Vec<f64>], k: usize, floor: f64) -> Vec<Component> {
    let n = rows.len();
    let d = rows[0].len();
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let nk: f64 = resp.iter().map(|r| r[c]).sum();
        if nk <= 1e-10 {
            continue;
        }
        let mut mean = DVector::zeros(d);
        for (x, r) in rows.iter().zip(resp) {
            mean.axpy(r[c], x, 1.0);
        }
        mean /= nk;
        let mut cov = DMatrix::zeros(d, d);
        for (x, r) in rows.iter().zip(resp) {
            let diff = x - &mean;
            cov.ger(r[c], &diff, &diff, 1.0);
        }
        cov /= nk;
        let eig = cov.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < floor) {
            let lifted = eig.eigenvalues.map(|l| l.max(floor));
            cov = &eig.eigenvectors * DMatrix::from_diagonal(&lifted) * eig.eigenvectors.transpose();
            cov = (&cov + cov.transpose()) * 0.5;
        }
        let factored = factor(&cov);
        if let Some((chol_l, log_det)) = factored {
            out.push(Component {
                log_weight: (nk / n as f64).ln(),
                mean,
                chol_l,
                log_det,
            });
        }
    }
    out
}

fn e_step(rows: &[DVector<f64>], comps: &[Component]) -> (f64, Vec<Vec<f64>>) {
    let mut ll = 0.0;
    let resp = rows
        .iter()
        .map(|x| {
            let logs: Vec<f64> = comps.iter().map(|c| c.log_weight + c.log_density(x)).collect();
            let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
            let lse = max + sum.ln();
            ll += lse;
            logs.iter().map(|l| (l - lse).exp()).collect()
        })
        .collect();
    (ll, resp)
}

/// Full-covariance Gaussian mixture fitted by EM, started from the hard
/// assignment `init` (which must have `k` clusters).
///
/// Stops when one E-step improves the log-likelihood by less than `tol`, or
/// after `max_iter` M-steps. Covariances are regularised so that no
/// eigenvalue falls below `1e-6 · (mean feature variance)`; a component that
/// still cannot be factored is dropped and the weights renormalise.
pub fn em_gmm(
    features: &FeatureMatrix,
    k: usize,
    init: &ClusterAssignment,
    max_iter: usize,
    tol: f64,
) -> Result<GmmFit> {
    check_features(features)?;
    let n = features.rows();
    if k == 0 || init.num_groups() != k || init.len() != n {
        return Err(Error::param(format!(
            "EM needs an initial assignment of {n} rows into k = {k} clusters, got {} rows in {}",
            init.len(),
            init.num_groups()
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::param("EM tolerance must be non-negative"));
    }
    let rows: Vec<DVector<f64>> = features.iter_rows().map(DVector::from_row_slice).collect();
    let means = features.column_means();
    let variances: Vec<f64> = (0..features.cols())
        .map(|j| features.iter_rows().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n as f64)
        .filter(|&v| v > 0.0)
        .collect();
    let floor = 1e-6
        * if variances.is_empty() {
            1.0
        } else {
            variances.iter().sum::<f64>() / variances.len() as f64
        };

    let mut resp: Vec<Vec<f64>> = init
        .labels()
        .iter()
        .map(|&l| {
            let mut r = vec![0.0; k];
            r[l] = 1.0;
            r
        })
        .collect();
    let mut width = k;
    let mut trace = Vec::new();
    let mut comps;
    let mut iterations = 0;
    loop {
        comps = m_step(&rows, &resp, width, floor);
        if comps.is_empty() {
            return Err(Error::Internal("every mixture component degenerated".into()));
        }
        iterations += 1;
        let (ll, next) = e_step(&rows, &comps);
        resp = next;
        width = comps.len();
        let improved = trace.last().is_none_or(|&prev: &f64| ll - prev >= tol);
        trace.push(ll);
        if !improved || iterations >= max_iter.max(1) {
            break;
        }
    }

    let weights: Vec<f64> = comps.iter().map(|c| c.log_weight.exp()).collect();
    let total: f64 = weights.iter().sum();
    let membership = MembershipMatrix::from_data(n, width, resp.concat());
    Ok(GmmFit {
        assignment: membership.hard_assignment(),
        membership,
        log_likelihood: trace,
        weights: weights.iter().map(|w| w / total).collect(),
        means: comps.iter().map(|c| c.mean.iter().copied().collect()).collect(),
        iterations,
    })
}
