//! Command-line plumbing around `momsos`: problem ingestion, run manifests,
//! pipelines and line-delimited JSON reports.

pub mod manifest;
pub mod pipeline;
pub mod problem;
pub mod report;
pub mod reproduce;

pub use manifest::RunManifest;
pub use pipeline::{build_formulation, cmd_relax, cmd_solve, cmd_verify, SolveOutcome};
pub use report::Report;
pub use reproduce::cmd_reproduce;
