//! Population frames, basic strata, and stratum summaries.
//!
//! A [`Frame`] is the raw micro-data. [`build_atomic_strata`] and
//! [`build_continuous_strata`] turn it into [`BasicStrata`], the indivisible
//! units the search moves around. A [`Stratification`] groups the basic strata
//! of every domain, and [`summarize`] collapses each group into the
//! `(N_h, M_gh, S_gh)` triple the allocator needs.

mod basic;
mod features;
mod frame;
mod summary;

pub use basic::{build_atomic_strata, build_continuous_strata, BasicStrata, BasicStratum, DomainStrata, MISSING_LEVEL};
pub use features::{standardize_features, FeatureMatrix};
pub use frame::{load_frame, Frame, Record, Schema};
pub use summary::{summarize, Moments, Partition, Stratification, StratumSummary};

use std::cmp::Ordering;

/// Order domain labels numerically when both parse as integers, otherwise
/// lexicographically. Keeps `2` before `10`.
pub(crate) fn compare_labels(a: &str, b: &str) -> Ordering {
    match (a.trim().parse::<i64>(), b.trim().parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}
