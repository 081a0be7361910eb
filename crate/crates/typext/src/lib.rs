//! JSON formats, reports, grid sweeps and the command-line front end for
//! [`typext_core`].

pub use typext_core as core;

pub mod cli;
pub mod format;
pub mod grid;
pub mod reports;
pub mod sweep;
