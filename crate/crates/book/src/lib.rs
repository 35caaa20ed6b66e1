//! Compiles and runs the code listings of the guide in `book/` as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/basic-strata.md")]
pub mod basic_strata {}

#[doc = include_str!("../../../book/src/allocation.md")]
pub mod allocation {}

#[doc = include_str!("../../../book/src/clustering.md")]
pub mod clustering {}

#[doc = include_str!("../../../book/src/hill-climbing.md")]
pub mod hill_climbing {}

#[doc = include_str!("../../../book/src/pipelines.md")]
pub mod pipelines {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
