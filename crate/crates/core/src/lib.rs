//! Corpus generation, iterative decoding and evaluation for grammatical
//! error correction.
//!
//! The crate is organised as a set of pipeline stages:
//!
//! - [`ingest`] streams pages and revisions out of MediaWiki history dumps and
//!   downsamples consecutive revision pairs.
//! - [`extract`] turns wikitext into plain text, aligns revisions, cuts the
//!   aligned text into example pairs and filters them.
//! - [`noise`] injects spelling errors, downsamples identity pairs and mines
//!   probabilistic edit rules.
//! - [`rtt`] synthesises parallel data by round-trip translation.
//! - [`subword`] trains and applies a BPE wordpiece model.
//! - [`decode`] implements cost-ratio iterative decoding and ensembling.
//! - [`metrics`] implements edit extraction, F-beta scoring and GLEU.
//! - [`pipeline`] wires the stages together for the command line tool.

pub mod decode;
pub mod error;
pub mod example;
pub mod extract;
pub mod ingest;
pub mod metrics;
pub mod noise;
pub mod pipeline;
pub mod rng;
pub mod rtt;
pub mod subword;
pub mod text;

pub use error::{Error, Result};
pub use example::{ExamplePair, Provenance};
