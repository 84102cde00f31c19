//! Feature-selection and classification engine for subject-grouped voice
//! recording datasets.
//!
//! The pipeline evaluates a binary logistic-regression classifier under
//! stratified leave-one-subject-out k-fold cross-validation, comparing three
//! feature-selection techniques (ANOVA filter, LASSO embedded, sequential
//! forward wrapper) under two selection strategies (maximize subject accuracy,
//! minimize subject cross-entropy). Results are reported at the subject level:
//! each individual's recordings are collapsed into one prediction by
//! thresholding the mean predicted probability.
//!
//! Module map:
//!
//! - [`dataset`] — ingestion, validation, and synthesis of recording-level data
//! - [`preprocess`] — per-fold Yeo-Johnson power transform + standardization
//! - [`linmodel`] — logistic regression (plain and L1-penalized solvers)
//! - [`featsel`] — rankings, ranked sweeps, and sequential forward selection
//! - [`cv`] — fold planning and the end-to-end experiment runner
//! - [`metrics`] — subject-level aggregation and the seven evaluation scores
//! - [`report`] — CSV / plain-text serialization of results and parameters
//! - [`svg`] — self-contained line-chart writer for selection curves

pub mod cv;
pub mod dataset;
mod error;
pub mod featsel;
pub mod linmodel;
pub mod metrics;
pub mod preprocess;
pub mod report;
pub mod svg;

pub use error::{Error, Result};
