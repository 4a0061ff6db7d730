//! Monte-Carlo harness behind the `robloc` command: bias sweeps over
//! kurtosis-matched families, SE studies, mHLM-vs-MoM variance, breakdown
//! probes, bound tables and orderliness verdicts. All output is CSV.

pub mod breakdown;
pub mod check;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;
pub mod roster;
pub mod sweep;
pub mod tables;
pub mod variance;

pub use error::{BenchError, Result};
