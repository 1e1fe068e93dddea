//! Experiments, file formats and the `fwlab` command line for the
//! `fractal-wave-core` solvers.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod plot;
pub mod presets;
pub mod report;
pub mod run;
