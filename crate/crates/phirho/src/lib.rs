//! File formats, verification suites and the `phirho` command line on top of
//! [`phirho_core`].
//!
//! - [`formats`]: JSON inputs (permutations, segment maps, diagonals, family
//!   specs) and the rearrangement report.
//! - [`table`]: point and curve CSV files with exact rational columns.
//! - [`svg`]: a self-contained scatter plot of the region.
//! - [`verify`]: the invariant suites, run in parallel.
//! - [`cli`]: argument parsing and the subcommands.

pub mod cli;
pub mod formats;
pub mod svg;
pub mod table;
pub mod verify;

pub use phirho_core as core;
