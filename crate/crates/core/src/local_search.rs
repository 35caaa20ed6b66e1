//! Hill climbing over stratifications with delta evaluation.
//!
//! A move takes one basic stratum out of its stratum and puts it in another
//! stratum of the same domain, or in a fresh one. Only the moved-between
//! strata are re-summarised and only their domain is re-allocated.

use std::collections::VecDeque;

use rand::Rng;

use crate::allocation::{bethel_allocate, AllocationOptions, AllocationResult, CostReport, PrecisionSpec};
use crate::rng;
use crate::strata::{BasicStrata, Moments, Partition, Stratification, StratumSummary};
use crate::{Error, Result};

/// Move one basic stratum of `domain` (index within the domain) from stratum
/// `from` to stratum `to`. `to` equal to the domain's stratum count opens a
/// new stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveProposal {
    pub domain: usize,
    pub basic: usize,
    pub from: usize,
    pub to: usize,
}

/// Outcome of evaluating a move without applying it.
#[derive(Debug, Clone)]
pub struct Delta {
    pub new_total: f64,
    pub domain_cost: f64,
    /// Summaries of the domain in the layout the move would produce.
    pub summaries: Vec<StratumSummary>,
    pub allocation: AllocationResult,
}

#[derive(Debug, Clone)]
struct DomainState {
    labels: Vec<usize>,
    moments: Vec<Moments>,
    sizes: Vec<usize>,
    summaries: Vec<StratumSummary>,
    allocation: AllocationResult,
}

impl DomainState {
    fn num_strata(&self) -> usize {
        self.moments.len()
    }
}

/// Label of every basic stratum after `mv`, following the swap-remove rule:
/// when the source stratum empties, the last stratum takes its label.
fn relabel(mv: &MoveProposal, sizes: &[usize], i: usize, old: usize) -> usize {
    let label = if i == mv.basic { mv.to } else { old };
    let emptied = sizes[mv.from] == 1;
    if emptied && label == sizes.len() - 1 {
        mv.from
    } else {
        label
    }
}

/// A stratification with cached per-stratum moments, summaries and
/// per-domain allocations.
#[derive(Debug, Clone)]
pub struct SearchState<'a> {
    strata: &'a BasicStrata,
    spec: &'a PrecisionSpec,
    opts: AllocationOptions,
    domains: Vec<DomainState>,
    total_cost: f64,
    /// Cumulative basic-strata counts of domains with at least two of them.
    eligible: Vec<(usize, usize)>,
}

impl<'a> SearchState<'a> {
    pub fn new(
        strata: &'a BasicStrata,
        initial: &Stratification,
        spec: &'a PrecisionSpec,
        opts: AllocationOptions,
    ) -> Result<Self> {
        initial.validate(strata)?;
        let g = strata.num_targets();
        let domains = strata
            .domains
            .iter()
            .zip(&initial.domains)
            .map(|(d, p)| {
                let mut moments = vec![Moments::empty(g); p.num_groups()];
                for (s, &l) in d.strata.iter().zip(p.labels()) {
                    moments[l].add(s);
                }
                let summaries: Vec<StratumSummary> = moments.iter().map(Moments::summary).collect();
                let allocation = bethel_allocate(&summaries, spec, &opts)?;
                Ok(DomainState {
                    labels: p.labels().to_vec(),
                    sizes: p.group_sizes(),
                    moments,
                    summaries,
                    allocation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut eligible = Vec::new();
        let mut cumulative = 0;
        for (i, d) in strata.domains.iter().enumerate() {
            if d.len() >= 2 {
                cumulative += d.len();
                eligible.push((cumulative, i));
            }
        }
        let total_cost = domains.iter().map(|d| d.allocation.total).sum();
        Ok(SearchState {
            strata,
            spec,
            opts,
            domains,
            total_cost,
            eligible,
        })
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn domain_cost(&self, domain: usize) -> f64 {
        self.domains[domain].allocation.total
    }

    pub fn summaries(&self, domain: usize) -> &[StratumSummary] {
        &self.domains[domain].summaries
    }

    pub fn num_strata(&self, domain: usize) -> usize {
        self.domains[domain].num_strata()
    }

    pub fn label(&self, domain: usize, basic: usize) -> usize {
        self.domains[domain].labels[basic]
    }

    pub fn stratification(&self) -> Stratification {
        Stratification {
            domains: self
                .domains
                .iter()
                .map(|d| Partition::new(d.labels.clone(), d.num_strata()).expect("search keeps strata non-empty"))
                .collect(),
        }
    }

    pub fn cost_report(&self) -> CostReport {
        CostReport {
            total: self.total_cost,
            per_domain: self.domains.iter().map(|d| d.allocation.clone()).collect(),
        }
    }

    /// True when some domain has two or more basic strata to move between.
    pub fn has_moves(&self) -> bool {
        !self.eligible.is_empty()
    }

    /// Draw a move: a basic stratum uniformly over all domains with at least
    /// two, then a destination uniformly over the other strata of its domain
    /// and one new-stratum slot. The new slot is left out when the basic
    /// stratum is alone in its stratum, since that move changes nothing.
    pub fn propose_move<R: Rng>(&self, rng: &mut R) -> Option<MoveProposal> {
        let &(total, _) = self.eligible.last()?;
        let pick = rng.random_range(0..total);
        let slot = self.eligible.partition_point(|&(c, _)| c <= pick);
        let (end, domain) = self.eligible[slot];
        let basic = pick - (end - self.strata.domains[domain].len());
        let d = &self.domains[domain];
        let from = d.labels[basic];
        let h = d.num_strata();
        let choices = if d.sizes[from] == 1 { h - 1 } else { h };
        let mut to = rng.random_range(0..choices);
        if to >= from {
            to += 1;
        }
        Some(MoveProposal {
            domain,
            basic,
            from,
            to,
        })
    }

    fn check_move(&self, mv: &MoveProposal) -> Result<()> {
        let d = self
            .domains
            .get(mv.domain)
            .ok_or_else(|| Error::param("move names an unknown domain"))?;
        if mv.basic >= d.labels.len() || d.labels[mv.basic] != mv.from || mv.to > d.num_strata() || mv.to == mv.from {
            return Err(Error::param(format!("illegal move {mv:?}")));
        }
        if mv.to == d.num_strata() && d.sizes[mv.from] == 1 {
            return Err(Error::param(
                "moving a lone basic stratum to a new stratum changes nothing",
            ));
        }
        Ok(())
    }

    fn layout(
        d: &DomainState,
        mv: &MoveProposal,
        from: Option<StratumSummary>,
        to: StratumSummary,
    ) -> Vec<StratumSummary> {
        let mut out = d.summaries.clone();
        if mv.to == out.len() {
            out.push(to);
        } else {
            out[mv.to] = to;
        }
        match from {
            Some(s) => out[mv.from] = s,
            None => {
                out.swap_remove(mv.from);
            }
        }
        out
    }

    fn total_with(&self, domain: usize, cost: f64) -> f64 {
        self.domains
            .iter()
            .enumerate()
            .map(|(i, d)| if i == domain { cost } else { d.allocation.total })
            .sum()
    }

    /// Cost of the state after `mv`, from add/remove updates of the two
    /// touched strata and a re-allocation of their domain only.
    pub fn delta_evaluate(&self, mv: &MoveProposal) -> Result<Delta> {
        self.check_move(mv)?;
        let d = &self.domains[mv.domain];
        let s = &self.strata.domains[mv.domain].strata[mv.basic];
        let mut from = d.moments[mv.from].clone();
        from.remove(s)?;
        let mut to = if mv.to == d.num_strata() {
            Moments::empty(self.strata.num_targets())
        } else {
            d.moments[mv.to].clone()
        };
        to.add(s);
        let from = (!from.is_empty()).then(|| from.summary());
        let summaries = Self::layout(d, mv, from, to.summary());
        let allocation = bethel_allocate(&summaries, self.spec, &self.opts)?;
        Ok(Delta {
            new_total: self.total_with(mv.domain, allocation.total),
            domain_cost: allocation.total,
            summaries,
            allocation,
        })
    }

    /// Cost of the state after `mv`, with the two touched strata rebuilt from
    /// their members in index order.
    fn fresh_evaluate(&self, mv: &MoveProposal) -> Result<(Vec<Moments>, Delta)> {
        let d = &self.domains[mv.domain];
        let members = &self.strata.domains[mv.domain].strata;
        let emptied = d.sizes[mv.from] == 1;
        let new_h = d.num_strata() + usize::from(mv.to == d.num_strata()) - usize::from(emptied);
        let to_label = relabel(mv, &d.sizes, mv.basic, mv.from);
        let touched: Vec<usize> = if emptied {
            vec![to_label]
        } else {
            vec![mv.from, to_label]
        };
        let mut fresh = vec![Moments::empty(self.strata.num_targets()); touched.len()];
        for (i, (s, &old)) in members.iter().zip(&d.labels).enumerate() {
            let l = relabel(mv, &d.sizes, i, old);
            if let Some(k) = touched.iter().position(|&t| t == l) {
                fresh[k].add(s);
            }
        }
        let mut moments = d.moments.clone();
        if mv.to == moments.len() {
            moments.push(Moments::empty(0));
        }
        if emptied {
            moments.swap_remove(mv.from);
        }
        debug_assert_eq!(moments.len(), new_h);
        for (&t, m) in touched.iter().zip(&fresh) {
            moments[t] = m.clone();
        }
        let summaries: Vec<StratumSummary> = moments.iter().map(Moments::summary).collect();
        let allocation = bethel_allocate(&summaries, self.spec, &self.opts)?;
        Ok((
            moments,
            Delta {
                new_total: self.total_with(mv.domain, allocation.total),
                domain_cost: allocation.total,
                summaries,
                allocation,
            },
        ))
    }

    /// Apply `mv` unconditionally, rebuilding the touched strata from their
    /// members so the cache matches a from-scratch summary exactly.
    pub fn apply(&mut self, mv: &MoveProposal) -> Result<f64> {
        self.check_move(mv)?;
        let (moments, delta) = self.fresh_evaluate(mv)?;
        self.commit(mv, moments, delta);
        Ok(self.total_cost)
    }

    fn commit(&mut self, mv: &MoveProposal, moments: Vec<Moments>, delta: Delta) {
        let d = &mut self.domains[mv.domain];
        let sizes = d.sizes.clone();
        for (i, l) in d.labels.iter_mut().enumerate() {
            *l = relabel(mv, &sizes, i, *l);
        }
        let mut new_sizes = vec![0; moments.len()];
        for &l in &d.labels {
            new_sizes[l] += 1;
        }
        d.sizes = new_sizes;
        d.moments = moments;
        d.summaries = delta.summaries;
        d.allocation = delta.allocation;
        self.total_cost = delta.new_total;
    }

    /// Evaluate `mv` incrementally and apply it if it strictly lowers the
    /// total cost. The decision is confirmed on the rebuilt strata so the
    /// recorded cost never rises through rounding.
    pub fn try_move(&mut self, mv: &MoveProposal) -> Result<bool> {
        let delta = self.delta_evaluate(mv)?;
        if !(delta.new_total < self.total_cost) {
            return Ok(false);
        }
        let (moments, fresh) = self.fresh_evaluate(mv)?;
        if !(fresh.new_total < self.total_cost) {
            return Ok(false);
        }
        self.commit(mv, moments, fresh);
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbOptions {
    /// Consecutive non-improving iterations before the stopping check.
    pub stall_limit: usize,
    /// Hard cap on iterations; `None` runs until the stall rule fires.
    pub max_iterations: Option<u64>,
    pub allocation: AllocationOptions,
}

impl Default for HillClimbOptions {
    fn default() -> Self {
        HillClimbOptions {
            stall_limit: 1000,
            max_iterations: None,
            allocation: AllocationOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub total_cost: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct HillClimbResult {
    pub stratification: Stratification,
    pub cost: CostReport,
    pub trace: Vec<TracePoint>,
    pub iterations: u64,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Single-move hill climbing from `initial`.
///
/// Each iteration proposes a random move and keeps it only if the total cost
/// strictly drops. The search ends once `stall_limit` consecutive moves have
/// failed and the cost rounded to two decimals equals the cost
/// `stall_limit` iterations earlier, rounded the same way.
pub fn hill_climb(
    strata: &BasicStrata,
    initial: &Stratification,
    spec: &PrecisionSpec,
    options: &HillClimbOptions,
    seed: u64,
) -> Result<HillClimbResult> {
    if options.stall_limit == 0 {
        return Err(Error::param("stall limit must be at least 1"));
    }
    let mut state = SearchState::new(strata, initial, spec, options.allocation)?;
    let mut rng = rng::stream(seed, rng::stream_id(&[0x6863]));
    let mut trace = Vec::new();
    let mut window: VecDeque<f64> = VecDeque::with_capacity(options.stall_limit + 1);
    window.push_back(state.total_cost());
    let mut stall = 0usize;
    let mut iteration = 0u64;
    while state.has_moves() && options.max_iterations.is_none_or(|m| iteration < m) {
        iteration += 1;
        let mv = state.propose_move(&mut rng).expect("eligible domain exists");
        let accepted = state.try_move(&mv)?;
        stall = if accepted { 0 } else { stall + 1 };
        trace.push(TracePoint {
            iteration,
            total_cost: state.total_cost(),
            accepted,
        });
        window.push_back(state.total_cost());
        if window.len() > options.stall_limit + 1 {
            window.pop_front();
        }
        if stall >= options.stall_limit {
            if round2(state.total_cost()) == round2(window[0]) {
                break;
            }
            stall = 0;
        }
    }
    Ok(HillClimbResult {
        stratification: state.stratification(),
        cost: state.cost_report(),
        trace,
        iterations: iteration,
    })
}
