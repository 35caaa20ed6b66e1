use super::BasicStratum;
use crate::{Error, Result};

/// Dense row-major matrix; rows are items, columns are features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::param(format!(
                "feature data has {} values, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged feature rows"));
        }
        Ok(FeatureMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for r in self.iter_rows() {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= self.rows as f64);
        means
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// z-score the basic-stratum means of one domain column by column.
///
/// Unweighted by stratum size, sample sd (divisor `n − 1`); a constant column
/// becomes all zeros. A domain with one basic stratum has nothing to cluster
/// and yields [`Error::DegenerateDomain`].
pub fn standardize_features(strata: &[BasicStratum]) -> Result<FeatureMatrix> {
    if strata.len() < 2 {
        return Err(Error::DegenerateDomain {
            domain: strata.first().map(|s| s.domain.clone()).unwrap_or_default(),
        });
    }
    let rows: Vec<Vec<f64>> = strata.iter().map(|s| s.mean.clone()).collect();
    let mut m = FeatureMatrix::from_rows(&rows)?;
    let n = m.rows as f64;
    let means = m.column_means();
    for (c, &mean) in means.iter().enumerate() {
        let var = (0..m.rows)
            .map(|r| (m.data[r * m.cols + c] - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        let sd = var.sqrt();
        for r in 0..m.rows {
            let v = &mut m.data[r * m.cols + c];
            *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
        }
    }
    Ok(m)
}
