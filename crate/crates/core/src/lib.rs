//! Corpus toolkit and classification pipeline for paragraph-level
//! legal-argument annotations.
//!
//! The crate is organized around a small set of building blocks:
//!
//! * [`corpus`] — data model, file ingestion/validation, corpus statistics
//!   and stratified splitting for annotated decision corpora;
//! * [`agreement`] — inter-annotator agreement (Cohen's kappa,
//!   Krippendorff's alpha) for holistic labels and per-type codings;
//! * [`metrics`] — binary macro P/R/F1 and the per-label
//!   positive/negative/macro F1 scheme for multilabel evaluation;
//! * [`features`] — document-level feature extraction, feature scaling and
//!   the MLP formalism classifier;
//! * [`attribution`] — exact Shapley-value feature attribution over the
//!   11-feature space;
//! * [`baselines`] — majority, random and trigger-lexicon predictors;
//! * [`pipeline`] — the three-stage formalism pipeline with pluggable
//!   stage backends and an external-process wire protocol;
//! * [`analysis`] — distribution reports and temporal trend series.

pub mod agreement;
pub mod analysis;
pub mod attribution;
pub mod baselines;
pub mod corpus;
pub mod features;
pub mod metrics;
pub mod pipeline;
