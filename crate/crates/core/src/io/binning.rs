use serde::{Deserialize, Serialize};

/// A categorical column made by cutting a numeric column at its quantiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinnedColumn {
    /// Numeric column to cut.
    pub source: String,
    /// Name of the new column.
    pub name: String,
    pub bins: usize,
}

/// Type-7 sample quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bin labels `1..` for `values`, cut at the distinct `k/bins` quantiles with
/// right-closed intervals and the lowest break included.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    if values.is_empty() || bins == 0 {
        return vec![1; values.len()];
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut breaks: Vec<f64> = (0..=bins).map(|k| quantile(&sorted, k as f64 / bins as f64)).collect();
    breaks.dedup();
    if breaks.len() < 2 {
        return vec![1; values.len()];
    }
    values
        .iter()
        .map(|&v| {
            // first interval (b[i], b[i+1]] holding v; the lowest is closed
            let i = breaks[1..].partition_point(|&b| b < v);
            i.min(breaks.len() - 2) + 1
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tertiles_of_one_to_nine() {
        let v: Vec<f64> = (1..=9).map(f64::from).collect();
        // breaks 1, 3.67, 6.33, 9
        assert_eq!(quantile_bins(&v, 3), vec![1, 1, 1, 2, 2, 2, 3, 3, 3]);
    }

    #[test]
    fn ties_collapse_breaks() {
        // breaks 0, 0, 0, 3.75, 10 collapse to 0, 3.75, 10
        let v = [0.0, 0.0, 0.0, 0.0, 5.0, 10.0];
        assert_eq!(quantile_bins(&v, 4), vec![1, 1, 1, 1, 2, 2]);
        assert_eq!(quantile_bins(&[2.0; 4], 3), vec![1; 4]);
    }

    #[test]
    fn boundary_values_fall_left() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        // breaks 1, 3, 5: 3 belongs to (1, 3]
        assert_eq!(quantile_bins(&v, 2), vec![1, 1, 1, 2, 2]);
    }
}
