//! End-to-end pipelines behind the command line tool.

mod config;
mod decoding;
mod evaluate;
mod output;
mod revisions;
mod roundtrip;
mod stats;
mod tune;

pub use config::{
    ExtractSettings, IngestSettings, NoiseSettings, PipelineConfig, ProviderSettings, RttSettings, DEFAULT_TOKEN_ENV,
};
pub use decoding::{load_reference_scorer, parse_decode_line, read_rewrites, run_decode, DecodeRecord, DecodeSummary};
pub use evaluate::{evaluate_gleu, evaluate_m2, read_lines, train_subword, SubwordSummary};
pub use output::{partial_path, AtomicOutput};
pub use revisions::{run_extract_revisions, ExtractSummary};
pub use roundtrip::{
    load_mock_table, make_provider, mine_edit_rules, parse_clean_line, read_edit_rules, run_build_rtt,
    write_edit_rules, RttSummary,
};
pub use stats::{corpus_stats, CorpusStats};
pub use tune::{sample_dev_subset, tune_threshold, DevSet, GridPoint, TuneMetric, TuneResult};

use serde::Serialize;

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_PROVIDER: i32 = 3;

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) => EXIT_USAGE,
        Error::Io(_) | Error::Xml { .. } | Error::Json(_) | Error::InvalidInput(_) => EXIT_DATA,
        Error::Provider(_) | Error::Scorer { .. } => EXIT_PROVIDER,
    }
}

/// One-line JSON run record.
#[derive(Serialize)]
pub struct Summary<'a, T: Serialize> {
    pub command: &'a str,
    pub config_hash: String,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Summary<'a, T> {
    pub fn new(command: &'a str, config: &PipelineConfig, body: T) -> Self {
        Summary { command, config_hash: config.hash(), body }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("summary serialises")
    }
}

pub(crate) fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

pub(crate) fn fraction(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}
