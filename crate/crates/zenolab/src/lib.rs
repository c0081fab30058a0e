//! Scenario runner, file formats and command line for `zenolab-core`.
//!
//! A scenario is a JSON document naming one of eight kinds, its parameters
//! and an output directory. [`runner::run`] validates it, computes every
//! table in memory and writes CSV files plus a `summary.txt`. The worked
//! examples ship as [`presets`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod format;
pub mod io;
pub mod presets;
pub mod runner;
pub mod scenario;

pub use format::{g17, Table};
pub use runner::{execute, run, run_file, Outcome, RunError};
pub use scenario::{Kind, Scenario};
