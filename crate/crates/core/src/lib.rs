//! Mapping-pattern engine for virtual knowledge graphs.
//!
//! Detects catalog patterns over a relational schema (and optionally its
//! data), bootstraps mappings and ontology axioms from them, and classifies
//! existing OBDA mappings back into the catalog.

pub mod error;
pub mod ingest;
pub mod classifier;
pub mod engine;
pub mod generator;
pub mod model;
pub mod naming;
pub mod profiler;

pub use error::{Error, Result};
