//! Joint stratification and sample allocation.
//!
//! A population frame is cut into *basic strata* (atomic cells of a categorical
//! cross product, or one per record). A stratification groups the basic strata
//! of every domain into strata, and its cost is the smallest total sample size
//! that meets coefficient-of-variation targets on every survey variable, as
//! computed by the Bethel-Chromy allocation in [`allocation`].
//!
//! Candidate stratifications come from the clusterers in [`clustering`]
//! (Hartigan-Wong k-means, Gaussian mixture EM, self-organising maps, fuzzy
//! c-means, neural gas, and two-stage prototype combinations), and are refined
//! by the hill climber in [`local_search`]. [`pipeline`] chains those stages and
//! tunes their hyperparameters; [`io`] holds run configuration, exports, and
//! the command implementations behind the `jointstrat` binary.
//!
//! ```
//! use jointstrat::allocation::{bethel_allocate, AllocationOptions, PrecisionSpec};
//! use jointstrat::strata::StratumSummary;
//!
//! let stratum = StratumSummary::new(1000, vec![10.0], vec![2.0]);
//! let spec = PrecisionSpec::new(vec![0.05])?;
//! let result = bethel_allocate(&[stratum], &spec, &AllocationOptions::default())?;
//! assert!((result.total - 15.748).abs() < 1e-3);
//! # Ok::<(), jointstrat::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod allocation;
pub mod clustering;
mod error;
pub mod io;
pub mod local_search;
pub mod pipeline;
pub mod rng;
pub mod strata;

pub use error::{Error, Result};
