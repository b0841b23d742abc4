//! Shared plumbing for the `cfraj` binary: run configurations and output files.

pub mod config;
pub mod output;
