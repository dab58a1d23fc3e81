//! Verification harness: configuration, suites, reports and the CLI.

pub mod cli;
pub mod config;
pub mod report;
pub mod suites;
