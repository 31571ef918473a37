//! Campaign-agnostic toolkit for telling state-backed troll accounts apart
//! from organic ones using only account-level behavior: how they tweet,
//! when they tweet, how they write, and which client applications they
//! claim to tweet from.
//!
//! The crate is organized as a pipeline:
//!
//! * [`ingest`] parses campaign CSV dumps and 1%-sample JSONL into the
//!   canonical [`model::Corpus`] form,
//! * [`stylometry`] and [`source`] provide per-tweet text statistics and
//!   client-name intelligence,
//! * [`features`] turns each account into a fixed 45-dimensional vector,
//! * [`stats`] contrasts populations (KS tests, TF-IDF, campaign metrics),
//! * [`learn`] trains and evaluates the four classifiers,
//! * [`eval`] reproduces the cross-campaign and in-the-wild protocols,
//! * [`synth`] generates labeled synthetic corpora for exercising all of
//!   the above without access to real dumps.
//!
//! Everything downstream of a seed is deterministic: rerunning any
//! operation with the same inputs and seed yields byte-identical output,
//! regardless of how many worker threads are in play.

pub mod error;
pub mod exec;
pub mod model;
pub mod ingest;
pub mod stylometry;
pub mod source;
pub mod features;
pub mod stats;
pub mod learn;
pub mod eval;
pub mod synth;
pub mod manifest;

pub use error::{Error, Result};
