//! Bethel-Chromy multivariate allocation.
//!
//! For one domain with strata `h = 1..H` and survey variables `g = 1..G`, find
//! real sample sizes `n_h` minimising `Σ n_h` subject to
//!
//! ```text
//! CV(T̂_g) = sqrt(Σ_h N_h² (1 − n_h/N_h) S_gh² / n_h) / T_g ≤ ε_g      for all g
//! min(2, N_h) ≤ n_h ≤ N_h                                              for all h
//! ```
//!
//! Each precision constraint is rewritten as `Σ_h a_gh / n_h ≤ 1` with
//! `a_gh = N_h² S_gh² / ((ε_g T_g)² + Σ_h N_h S_gh²)`. Chromy's fixed point on
//! normalised multipliers `α` solves the problem without box bounds; an outer
//! active-set loop pins strata whose unconstrained size falls outside
//! `[min(2, N_h), N_h]`, charges their share of each constraint against the
//! budget, and re-solves for the remaining strata until the pinned set is
//! consistent with the multipliers (the KKT conditions of the convex problem).

use rayon::prelude::*;

use crate::strata::{summarize, BasicStrata, Stratification, StratumSummary};
use crate::{Error, Result};

/// Per-variable coefficient-of-variation targets `ε_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionSpec {
    epsilon: Vec<f64>,
    names: Vec<String>,
}

impl PrecisionSpec {
    pub fn new(epsilon: Vec<f64>) -> Result<Self> {
        let names = (1..=epsilon.len()).map(|g| format!("Y{g}")).collect();
        Self::with_names(epsilon, names)
    }

    pub fn with_names(epsilon: Vec<f64>, names: Vec<String>) -> Result<Self> {
        if epsilon.is_empty() {
            return Err(Error::Config("precision needs at least one target".into()));
        }
        if names.len() != epsilon.len() {
            return Err(Error::Config(format!(
                "{} precision targets for {} variables",
                epsilon.len(),
                names.len()
            )));
        }
        if let Some(g) = epsilon.iter().position(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::Config(format!(
                "cv target for `{}` must lie in (0, 1), got {}",
                names[g], epsilon[g]
            )));
        }
        Ok(PrecisionSpec { epsilon, names })
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.epsilon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilon.is_empty()
    }

    /// Same variables with every target multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::with_names(self.epsilon.iter().map(|e| e * factor).collect(), self.names.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationOptions {
    /// Stop the multiplier iteration once no `α_g` moves by this much.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for AllocationOptions {
    fn default() -> Self {
        AllocationOptions {
            tolerance: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Real-valued sample size per stratum.
    pub n: Vec<f64>,
    pub total: f64,
    pub achieved_cv: Vec<f64>,
    pub converged: bool,
    /// Multiplier iterations summed over active-set rounds.
    pub iterations: usize,
}

impl AllocationResult {
    /// True when some stratum sits on a box bound.
    pub fn bound_active(&self, summaries: &[StratumSummary]) -> bool {
        self.n.iter().zip(summaries).any(|(&n, s)| {
            let (lo, hi) = bounds(s.count);
            n <= lo || n >= hi
        })
    }
}

fn bounds(count: usize) -> (f64, f64) {
    let hi = count as f64;
    (hi.min(2.0), hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pin {
    Free,
    Low,
    High,
}

struct ChromyRun {
    n: Vec<f64>,
    /// Un-normalised multipliers: `n_h = sqrt(Σ_g λ_g a_gh)` on free strata.
    lambda: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Chromy's fixed point for `min Σ n_h` s.t. `Σ_h a[g][h] / n_h ≤ 1`, over the
/// strata flagged in `free`. Rows of `a` that are zero on every free stratum
/// are ignored.
fn chromy(a: &[Vec<f64>], free: &[bool], opts: &AllocationOptions) -> ChromyRun {
    let h_count = free.len();
    let active: Vec<usize> = (0..a.len())
        .filter(|&g| a[g].iter().zip(free).any(|(&v, &f)| f && v > 0.0))
        .collect();
    let mut lambda = vec![0.0; a.len()];
    if active.is_empty() {
        return ChromyRun {
            n: vec![0.0; h_count],
            lambda,
            iterations: 0,
            converged: true,
        };
    }

    let sizes = |alpha: &[f64]| -> (Vec<f64>, f64) {
        let roots: Vec<f64> = (0..h_count)
            .map(|h| {
                if !free[h] {
                    return 0.0;
                }
                active.iter().zip(alpha).map(|(&g, &w)| w * a[g][h]).sum::<f64>().sqrt()
            })
            .collect();
        let sum: f64 = roots.iter().sum();
        (roots.iter().map(|r| r * sum).collect(), sum)
    };

    let mut alpha = vec![1.0 / active.len() as f64; active.len()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let (n, _) = sizes(&alpha);
        let load: Vec<f64> = active
            .iter()
            .map(|&g| {
                (0..h_count)
                    .filter(|&h| n[h] > 0.0)
                    .map(|h| a[g][h] / n[h])
                    .sum::<f64>()
            })
            .collect();
        let denom: f64 = alpha.iter().zip(&load).map(|(w, r)| w * r * r).sum();
        let mut change: f64 = 0.0;
        for (w, r) in alpha.iter_mut().zip(&load) {
            let next = *w * r * r / denom;
            change = change.max((next - *w).abs());
            *w = next;
        }
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }
    // An unconverged iterate can sit below some constraint; scaling all sizes
    // by the worst load restores feasibility (and is exact when H = 1).
    let (mut n, sum) = sizes(&alpha);
    let worst = active
        .iter()
        .map(|&g| {
            (0..h_count)
                .filter(|&h| n[h] > 0.0)
                .map(|h| a[g][h] / n[h])
                .sum::<f64>()
        })
        .fold(1.0, f64::max);
    n.iter_mut().for_each(|v| *v *= worst);
    for (&g, &w) in active.iter().zip(&alpha) {
        lambda[g] = w * sum * sum * worst * worst;
    }
    ChromyRun {
        n,
        lambda,
        iterations,
        converged,
    }
}

/// Minimum total sample size meeting every CV target on one domain.
pub fn bethel_allocate(
    summaries: &[StratumSummary],
    spec: &PrecisionSpec,
    opts: &AllocationOptions,
) -> Result<AllocationResult> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::param(format!(
            "allocation tolerance must be positive, got {}",
            opts.tolerance
        )));
    }
    if summaries.is_empty() {
        return Err(Error::param("allocation needs at least one stratum"));
    }
    let g_count = spec.len();
    if let Some(s) = summaries
        .iter()
        .find(|s| s.count == 0 || s.mean.len() != g_count || s.sd.len() != g_count)
    {
        return Err(Error::Invariant(format!(
            "stratum summary with N = {} and {} statistics for {} targets",
            s.count,
            s.mean.len(),
            g_count
        )));
    }
    let h_count = summaries.len();
    let counts: Vec<f64> = summaries.iter().map(|s| s.count as f64).collect();
    let (lo, hi): (Vec<f64>, Vec<f64>) = summaries.iter().map(|s| bounds(s.count)).unzip();

    let totals: Vec<f64> = (0..g_count)
        .map(|g| summaries.iter().zip(&counts).map(|(s, n)| n * s.mean[g]).sum())
        .collect();

    // a[g][h]; rows of zeros for variables without spread.
    let mut a = vec![vec![0.0; h_count]; g_count];
    for g in 0..g_count {
        let spread: f64 = summaries.iter().zip(&counts).map(|(s, n)| n * s.sd[g] * s.sd[g]).sum();
        if spread == 0.0 {
            continue;
        }
        if totals[g] == 0.0 {
            return Err(Error::InfeasiblePrecision {
                target: spec.names()[g].clone(),
            });
        }
        let denom = (spec.epsilon()[g] * totals[g]).powi(2) + spread;
        for (h, s) in summaries.iter().enumerate() {
            a[g][h] = counts[h] * counts[h] * s.sd[g] * s.sd[g] / denom;
        }
    }

    let mut pins = vec![Pin::Free; h_count];
    // Strata with lo == hi have nothing to decide.
    for h in 0..h_count {
        if lo[h] >= hi[h] {
            pins[h] = Pin::High;
        }
    }
    let mut n = vec![0.0; h_count];
    let mut iterations = 0;
    let mut converged = false;
    let max_rounds = 2 * h_count + 8;
    for _ in 0..max_rounds {
        let fixed_size = |h: usize, pin: Pin| match pin {
            Pin::Low => lo[h],
            Pin::High => hi[h],
            Pin::Free => f64::NAN,
        };
        // Budget left for the free strata in every constraint.
        let mut budget = vec![1.0; g_count];
        for g in 0..g_count {
            for h in 0..h_count {
                if pins[h] != Pin::Free {
                    budget[g] -= a[g][h] / fixed_size(h, pins[h]);
                }
            }
        }
        let starved: Vec<usize> = (0..g_count)
            .filter(|&g| budget[g] <= 1e-12 && a[g].iter().any(|&v| v > 0.0))
            .collect();
        if !starved.is_empty() {
            // Strata pinned low use more budget than the constraint allows;
            // free them and solve again.
            let mut released = false;
            for h in 0..h_count {
                if pins[h] == Pin::Low && starved.iter().any(|&g| a[g][h] > 0.0) {
                    pins[h] = Pin::Free;
                    released = true;
                }
            }
            if released {
                continue;
            }
            return Err(Error::Internal("allocation budget exhausted by take-all strata".into()));
        }

        let free: Vec<bool> = pins.iter().map(|&p| p == Pin::Free).collect();
        let scaled: Vec<Vec<f64>> = (0..g_count)
            .map(|g| a[g].iter().map(|v| v / budget[g]).collect())
            .collect();
        let run = chromy(&scaled, &free, opts);
        iterations += run.iterations;
        let lambda: Vec<f64> = (0..g_count).map(|g| run.lambda[g] / budget[g]).collect();

        let mut next = pins.clone();
        for h in 0..h_count {
            if lo[h] >= hi[h] {
                continue;
            }
            let want = (0..g_count).map(|g| lambda[g] * a[g][h]).sum::<f64>().sqrt();
            next[h] = if want < lo[h] {
                Pin::Low
            } else if want > hi[h] {
                Pin::High
            } else {
                Pin::Free
            };
        }
        for h in 0..h_count {
            n[h] = match pins[h] {
                Pin::Free => run.n[h].clamp(lo[h], hi[h]),
                p => fixed_size(h, p),
            };
        }
        if next == pins {
            converged = run.converged;
            break;
        }
        pins = next;
    }

    let achieved_cv = (0..g_count)
        .map(|g| {
            let var: f64 = summaries
                .iter()
                .zip(&n)
                .map(|(s, &nh)| {
                    let big = s.count as f64;
                    (big * (big - nh) * s.sd[g] * s.sd[g] / nh).max(0.0)
                })
                .sum();
            if var == 0.0 {
                0.0
            } else {
                var.sqrt() / totals[g].abs()
            }
        })
        .collect();
    Ok(AllocationResult {
        total: n.iter().sum(),
        n,
        achieved_cv,
        converged,
        iterations,
    })
}

/// Allocation of every domain of a stratification.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub total: f64,
    pub per_domain: Vec<AllocationResult>,
}

/// Summarise each domain under `s` and allocate it; the cost is the sum of the
/// per-domain totals.
pub fn evaluate_cost(
    strata: &BasicStrata,
    s: &Stratification,
    spec: &PrecisionSpec,
    opts: &AllocationOptions,
) -> Result<CostReport> {
    s.validate(strata)?;
    let per_domain = strata
        .domains
        .par_iter()
        .zip(&s.domains)
        .map(|(d, p)| bethel_allocate(&summarize(&d.strata, p)?, spec, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CostReport {
        total: per_domain.iter().map(|r| r.total).sum(),
        per_domain,
    })
}
