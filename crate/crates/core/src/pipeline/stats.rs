use std::io::BufRead;

use log::warn;
use serde::Serialize;

use crate::error::Result;
use crate::example::ExamplePair;
use crate::text::word_count;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sentences: u64,
    /// Whitespace tokens on the target side.
    pub words: u64,
    pub source_words: u64,
    pub identities: u64,
    pub identity_fraction: f64,
    pub malformed_lines: u64,
}

/// Counts an example-pair corpus. Lines that do not parse are counted and
/// skipped.
pub fn corpus_stats(corpus: impl BufRead) -> Result<CorpusStats> {
    let mut stats = CorpusStats::default();
    for (n, line) in corpus.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ExamplePair>(&line) {
            Ok(pair) => {
                stats.sentences += 1;
                stats.words += word_count(&pair.target) as u64;
                stats.source_words += word_count(&pair.source) as u64;
                stats.identities += u64::from(pair.is_identity);
            }
            Err(e) => {
                warn!("line {}: {e}", n + 1);
                stats.malformed_lines += 1;
            }
        }
    }
    stats.identity_fraction = super::fraction(stats.identities, stats.sentences);
    Ok(stats)
}
