//! Distant data augmentation for event causality detection.
//!
//! The crate is organised around the stages of the augmentation pipeline:
//!
//! * [`lexicon`] expands gold causal event pairs through synonym/hypernym and
//!   verb-class fixtures.
//! * [`embedding`] trains a translation-embedding scorer and keeps the
//!   closest candidate pairs.
//! * [`annotator`] streams a corpus and distantly labels sentences that
//!   contain a known pair.
//! * [`commonsense`] scores labeled sentences with co-occurrence causal
//!   strength and keeps the strongest ones per connective partition.
//! * [`detector`] trains the causality classifier with relabeling and an
//!   annealed schedule.
//! * [`pipeline`] wires everything into named stages with content-hashed
//!   manifests.
//!
//! Interchangeable algorithms (expansion sources, negative samplers,
//! classifiers, pipeline stages) sit behind traits and are looked up by name.

pub mod annotator;
pub mod commonsense;
pub mod detector;
pub mod embedding;
mod error;
pub mod lexicon;
pub mod manifest;
pub mod pipeline;
pub mod synthetic;
pub mod util;

pub use error::{Error, Result};
