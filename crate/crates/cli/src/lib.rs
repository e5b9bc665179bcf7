//! Experiment harness around `qmarko`: instance files, single runs, sweeps
//! over methods and seeds, and report generation.

pub mod cli;
pub mod config;
pub mod io;
pub mod report;
pub mod run;
pub mod sweep;
