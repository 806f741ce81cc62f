//! MediaWiki history dump ingestion.

mod dump;
mod sample;

pub use dump::{DumpReader, IngestStats, DEFAULT_MAX_PAGE_BYTES};
pub use sample::{sample_revision_pairs, sampled_pair_count, DEFAULT_DOWNSAMPLE_BASE};

use serde::{Deserialize, Serialize};

/// One chronological snapshot of a page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub revision_id: u64,
    pub timestamp: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub page_id: u64,
    pub title: String,
    /// Revisions in dump (chronological) order.
    pub revisions: Vec<Snapshot>,
}

impl Page {
    /// Number of revisions.
    pub fn n(&self) -> usize {
        self.revisions.len()
    }
}

/// Two consecutive snapshots of the same page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RevisionPair<'a> {
    pub page_id: u64,
    pub older: &'a Snapshot,
    pub newer: &'a Snapshot,
}
