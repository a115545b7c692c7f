//! Rough DEMATEL: group influence judgments as rough intervals, the interval
//! total-relation matrix, cause/effect classification, criterion weights and
//! a thresholded influence network.
//!
//! The usual entry point is [`pipeline::analyze_experts`] (raw expert
//! matrices) or [`pipeline::analyze_group`] (an already aggregated rough group
//! matrix). Bundles and CSV files are read by [`ingest`]; [`report`] renders
//! the results.

pub mod cli;
pub mod crisp;
pub mod dematel;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod network;
pub mod pipeline;
pub mod published;
pub mod report;
pub mod rough;

pub use error::{Error, Result};
pub use pipeline::{analyze_experts, analyze_group, Analysis, AnalysisConfig};
