use super::{BasicStrata, BasicStratum};
use crate::{Error, Result};

/// Relative tolerance under which a negative pooled variance is treated as
/// rounding noise and clamped to zero.
const VARIANCE_CLAMP: f64 = 1e-12;
/// Relative tolerance beyond which a negative variance after a removal means
/// the cached moments no longer match their members.
const VARIANCE_FAULT: f64 = 1e-9;

/// `(N_h, M_gh, S_gh)` of one stratum. `sd` uses divisor `N_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumSummary {
    pub count: usize,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl StratumSummary {
    pub fn new(count: usize, mean: Vec<f64>, sd: Vec<f64>) -> Self {
        StratumSummary { count, mean, sd }
    }
}

/// Pooled count, mean and sum of squared deviations of a set of basic strata.
///
/// Adding a basic stratum `(N_i, M_i, S_i)` uses the pairwise update
/// `M2 += N_i S_i² + δ² n N_i / (n + N_i)`, which equals the textbook
/// `Σ N_i (S_i² + M_i²) − N M²` pooling without its cancellation. Removal is
/// the exact inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Moments {
    pub fn empty(num_targets: usize) -> Self {
        Moments {
            count: 0,
            mean: vec![0.0; num_targets],
            m2: vec![0.0; num_targets],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn add(&mut self, s: &BasicStratum) {
        let n = self.count as f64;
        let ni = s.count as f64;
        let total = n + ni;
        for g in 0..self.mean.len() {
            let delta = s.mean[g] - self.mean[g];
            self.mean[g] += delta * ni / total;
            self.m2[g] += ni * s.sd[g] * s.sd[g] + delta * delta * n * ni / total;
        }
        self.count += s.count;
    }

    /// Take `s` back out. Fails if the result would have a variance that is
    /// negative beyond rounding, which means the moments were not built from
    /// a set containing `s`.
    pub fn remove(&mut self, s: &BasicStratum) -> Result<()> {
        if s.count > self.count {
            return Err(Error::Internal(format!(
                "removing {} units from a stratum of {}",
                s.count, self.count
            )));
        }
        if s.count == self.count {
            *self = Moments::empty(self.mean.len());
            return Ok(());
        }
        let n = self.count as f64;
        let ni = s.count as f64;
        let rest = n - ni;
        for g in 0..self.mean.len() {
            let mean_rest = (n * self.mean[g] - ni * s.mean[g]) / rest;
            let delta = s.mean[g] - mean_rest;
            let m2 = self.m2[g] - ni * s.sd[g] * s.sd[g] - delta * delta * rest * ni / n;
            let scale = self.m2[g] + ni * s.sd[g] * s.sd[g] + n * self.mean[g] * self.mean[g];
            if m2 < -VARIANCE_FAULT * scale.max(1.0) {
                return Err(Error::Internal(format!(
                    "negative variance {m2:e} after removing basic stratum {}",
                    s.id
                )));
            }
            self.mean[g] = mean_rest;
            self.m2[g] = m2.max(0.0);
        }
        self.count -= s.count;
        Ok(())
    }

    pub fn summary(&self) -> StratumSummary {
        let n = self.count as f64;
        let sd = self
            .m2
            .iter()
            .zip(&self.mean)
            .map(|(&m2, &m)| {
                let var = m2 / n;
                if var < 0.0 && var > -VARIANCE_CLAMP * (m * m).max(1.0) {
                    0.0
                } else {
                    var.sqrt()
                }
            })
            .collect();
        StratumSummary {
            count: self.count,
            mean: self.mean.clone(),
            sd,
        }
    }
}

/// A hard partition of `len()` items into groups labelled `0..num_groups()`.
/// Every label is used at least once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    num_groups: usize,
}

impl Partition {
    /// Validate labels that are already dense.
    pub fn new(labels: Vec<usize>, num_groups: usize) -> Result<Self> {
        let mut used = vec![false; num_groups];
        for &l in &labels {
            if l >= num_groups {
                return Err(Error::Invariant(format!("label {l} outside 0..{num_groups}")));
            }
            used[l] = true;
        }
        if let Some(empty) = used.iter().position(|u| !u) {
            return Err(Error::Invariant(format!("stratum {empty} is empty")));
        }
        Ok(Partition { labels, num_groups })
    }

    /// Renumber arbitrary labels densely in order of first appearance,
    /// dropping unused ones.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            labels,
            num_groups: map.len(),
        }
    }

    /// Everything in one group.
    pub fn single(len: usize) -> Self {
        Partition {
            labels: vec![0; len],
            num_groups: usize::from(len > 0),
        }
    }

    /// Every item in its own group.
    pub fn identity(len: usize) -> Self {
        Partition {
            labels: (0..len).collect(),
            num_groups: len,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn members(&self, group: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == group)
            .map(|(i, _)| i)
            .collect()
    }

    /// Compose with a labelling of the groups: item `i` gets
    /// `group_labels[self.labels[i]]`, compacted.
    pub fn coarsen(&self, group_labels: &[usize]) -> Partition {
        let raw: Vec<usize> = self.labels.iter().map(|&l| group_labels[l]).collect();
        Partition::from_labels(&raw)
    }
}

/// Per-domain partitions of basic strata, aligned with [`BasicStrata::domains`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stratification {
    pub domains: Vec<Partition>,
}

impl Stratification {
    /// One stratum per domain.
    pub fn single(strata: &BasicStrata) -> Self {
        Stratification {
            domains: strata.domains.iter().map(|d| Partition::single(d.len())).collect(),
        }
    }

    /// Every basic stratum its own stratum.
    pub fn identity(strata: &BasicStrata) -> Self {
        Stratification {
            domains: strata.domains.iter().map(|d| Partition::identity(d.len())).collect(),
        }
    }

    pub fn validate(&self, strata: &BasicStrata) -> Result<()> {
        if self.domains.len() != strata.domains.len() {
            return Err(Error::Invariant(format!(
                "stratification covers {} domains, frame has {}",
                self.domains.len(),
                strata.domains.len()
            )));
        }
        for (p, d) in self.domains.iter().zip(&strata.domains) {
            if p.len() != d.len() {
                return Err(Error::Invariant(format!(
                    "domain `{}`: {} labels for {} basic strata",
                    d.label,
                    p.len(),
                    d.len()
                )));
            }
        }
        Ok(())
    }

    /// Total number of strata over all domains.
    pub fn num_strata(&self) -> usize {
        self.domains.iter().map(|p| p.num_groups()).sum()
    }
}

/// Pool the basic strata of one domain by `partition`.
pub fn summarize(strata: &[BasicStratum], partition: &Partition) -> Result<Vec<StratumSummary>> {
    if strata.len() != partition.len() {
        return Err(Error::Invariant(format!(
            "{} labels for {} basic strata",
            partition.len(),
            strata.len()
        )));
    }
    let g = strata.first().map_or(0, |s| s.mean.len());
    let mut acc = vec![Moments::empty(g); partition.num_groups()];
    for (s, &l) in strata.iter().zip(partition.labels()) {
        acc[l].add(s);
    }
    acc.iter()
        .enumerate()
        .map(|(h, m)| {
            if m.is_empty() {
                Err(Error::Invariant(format!("stratum {h} is empty")))
            } else {
                Ok(m.summary())
            }
        })
        .collect()
}
