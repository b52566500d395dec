//! Monte Carlo experiments for tornado tabulation hashing, and the
//! `tornado` command-line tool.

pub mod config;
pub mod experiments;
pub mod keysets;
pub mod report;
pub mod seeds;
pub mod stats;
pub mod cli;
pub mod conformance;
