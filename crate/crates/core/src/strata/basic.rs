use std::collections::BTreeMap;

use super::{compare_labels, Frame};
use crate::{Error, Result};

/// Level token standing in for an empty or `NA` auxiliary cell.
pub const MISSING_LEVEL: &str = "__NA__";

/// An indivisible unit of stratification.
///
/// `sd` is the population standard deviation (divisor `count`), so merging
/// basic strata with [`super::Moments`] reproduces the pooled statistics
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicStratum {
    pub id: usize,
    pub domain: String,
    pub count: usize,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// Auxiliary tuple defining an atomic stratum; empty in continuous mode.
    pub key: Vec<String>,
    /// Indices into [`Frame::records`].
    pub members: Vec<usize>,
}

impl BasicStratum {
    /// A basic stratum from raw statistics, without record membership.
    pub fn from_stats(id: usize, domain: &str, count: usize, mean: Vec<f64>, sd: Vec<f64>) -> Self {
        BasicStratum {
            id,
            domain: domain.to_string(),
            count,
            mean,
            sd,
            key: Vec::new(),
            members: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainStrata {
    pub label: String,
    pub strata: Vec<BasicStratum>,
}

impl DomainStrata {
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    /// Total population count of the domain.
    pub fn population(&self) -> usize {
        self.strata.iter().map(|s| s.count).sum()
    }
}

/// All basic strata of a frame, grouped by domain in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicStrata {
    pub target_names: Vec<String>,
    pub domains: Vec<DomainStrata>,
}

impl BasicStrata {
    /// Assemble from per-domain lists, checking that every stratum has one
    /// statistic per target and a positive count.
    pub fn new(target_names: Vec<String>, domains: Vec<DomainStrata>) -> Result<Self> {
        let g = target_names.len();
        if g == 0 {
            return Err(Error::Config("at least one target is required".into()));
        }
        for d in &domains {
            if d.strata.is_empty() {
                return Err(Error::Invariant(format!("domain `{}` has no basic strata", d.label)));
            }
            for s in &d.strata {
                if s.count == 0 || s.mean.len() != g || s.sd.len() != g {
                    return Err(Error::Invariant(format!(
                        "basic stratum {} of domain `{}` is malformed",
                        s.id, d.label
                    )));
                }
            }
        }
        Ok(BasicStrata { target_names, domains })
    }

    pub fn num_targets(&self) -> usize {
        self.target_names.len()
    }

    /// Number of basic strata over all domains.
    pub fn len(&self) -> usize {
        self.domains.iter().map(|d| d.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &BasicStratum> {
        self.domains.iter().flat_map(|d| d.strata.iter())
    }

    pub fn domain(&self, label: &str) -> Option<&DomainStrata> {
        self.domains.iter().find(|d| d.label == label)
    }
}

/// Per-target mean and population sd over a subset of records.
fn moments_of(frame: &Frame, members: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let g = frame.num_targets();
    let n = members.len() as f64;
    let mut mean = vec![0.0; g];
    for &i in members {
        for (m, y) in mean.iter_mut().zip(&frame.records[i].targets) {
            *m += y;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; g];
    for &i in members {
        for ((v, y), m) in var.iter_mut().zip(&frame.records[i].targets).zip(&mean) {
            *v += (y - m) * (y - m);
        }
    }
    let sd = var.into_iter().map(|v| (v / n).sqrt()).collect();
    (mean, sd)
}

fn group_by_domain(frame: &Frame) -> Vec<(String, Vec<usize>)> {
    let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in frame.records.iter().enumerate() {
        map.entry(r.domain.as_str()).or_default().push(i);
    }
    let mut out: Vec<(String, Vec<usize>)> = map.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    out.sort_by(|a, b| compare_labels(&a.0, &b.0));
    out
}

/// One basic stratum per `(domain, auxiliary tuple)` cell that holds at least
/// one record. Ids run over all domains in `(domain, tuple)` order.
pub fn build_atomic_strata(frame: &Frame) -> Result<BasicStrata> {
    if frame.aux_names.is_empty() {
        return Err(Error::NoAuxiliaries);
    }
    let mut next_id = 0;
    let mut domains = Vec::new();
    for (label, rows) in group_by_domain(frame) {
        let mut cells: BTreeMap<&[String], Vec<usize>> = BTreeMap::new();
        for &i in &rows {
            cells
                .entry(frame.records[i].auxiliaries.as_slice())
                .or_default()
                .push(i);
        }
        let strata = cells
            .into_iter()
            .map(|(key, members)| {
                let (mean, sd) = moments_of(frame, &members);
                let s = BasicStratum {
                    id: next_id,
                    domain: label.clone(),
                    count: members.len(),
                    mean,
                    sd,
                    key: key.to_vec(),
                    members,
                };
                next_id += 1;
                s
            })
            .collect();
        domains.push(DomainStrata { label, strata });
    }
    BasicStrata::new(frame.target_names.clone(), domains)
}

/// One basic stratum per record: `N = 1`, mean equal to the record's targets,
/// zero sd.
pub fn build_continuous_strata(frame: &Frame) -> Result<BasicStrata> {
    let g = frame.num_targets();
    let mut next_id = 0;
    let mut domains = Vec::new();
    for (label, rows) in group_by_domain(frame) {
        let strata = rows
            .into_iter()
            .map(|i| {
                let s = BasicStratum {
                    id: next_id,
                    domain: label.clone(),
                    count: 1,
                    mean: frame.records[i].targets.clone(),
                    sd: vec![0.0; g],
                    key: Vec::new(),
                    members: vec![i],
                };
                next_id += 1;
                s
            })
            .collect();
        domains.push(DomainStrata { label, strata });
    }
    BasicStrata::new(frame.target_names.clone(), domains)
}
