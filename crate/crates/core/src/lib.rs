//! Rank-based dependence analysis for paired continuous data.
//!
//! The pipeline: ingest a bivariate sample, rank-transform it into
//! pseudo-observations, build the empirical copula, compute Spearman's
//! concordance and Schweizer-Wolff's dependence with exact integer
//! kernels, inspect diagonal sections and gluing points, classify the
//! rank-plot pattern (R1..R9), and render everything as a deterministic
//! nine-panel SVG with a JSON report.

pub mod analysis;
pub mod ecopula;
pub mod error;
pub mod ingest;
pub mod models;
pub mod plot;
pub mod ranks;
pub mod report;

pub use error::{Error, Result};
