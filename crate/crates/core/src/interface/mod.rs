//! Configuration files, CSV/summary export and the command line.

pub mod cli;
pub mod config;
pub mod export;
