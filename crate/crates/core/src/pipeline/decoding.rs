use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PipelineConfig;
use crate::decode::{iterative_decode_traced, BigramModel, ReferenceScorer, Scorer};
use crate::error::{Error, Result};
use crate::noise::EditRule;

const BATCH: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeRecord {
    pub source: String,
    pub output: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DecodeSummary {
    pub sentences: u64,
    pub rewritten: u64,
    pub iterations: u64,
}

#[derive(Deserialize)]
struct SourceOnly {
    source: String,
}

/// A line to decode: a JSON object with a `source` field, or plain text.
pub fn parse_decode_line(line: &str) -> Result<Option<String>> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    if line.trim_start().starts_with('{') {
        let record: SourceOnly = serde_json::from_str(line)?;
        return Ok(Some(record.source));
    }
    Ok(Some(line.to_owned()))
}

pub fn run_decode(
    config: &PipelineConfig,
    input: impl BufRead,
    scorer: &dyn Scorer,
    out: &mut impl Write,
) -> Result<DecodeSummary> {
    config.decode.validate()?;
    let pool = super::worker_pool(config.workers)?;
    let mut summary = DecodeSummary::default();
    let mut lines = input.lines();
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        for line in lines.by_ref() {
            if let Some(s) = parse_decode_line(&line?)? {
                batch.push(s);
                if batch.len() == BATCH {
                    break;
                }
            }
        }
        if batch.is_empty() {
            break;
        }
        let decoded: Vec<Result<DecodeRecord>> = pool.install(|| {
            batch
                .par_iter()
                .map(|source| {
                    let o = iterative_decode_traced(source, &scorer, &config.decode)?;
                    Ok(DecodeRecord { source: source.clone(), output: o.output, iterations: o.iterations })
                })
                .collect()
        });
        for record in decoded {
            let record = record?;
            summary.sentences += 1;
            summary.rewritten += u64::from(record.output != record.source);
            summary.iterations += record.iterations as u64;
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
    }
    out.flush()?;
    Ok(summary)
}

/// Rewrite rules from JSON Lines edit rules (original to revised) or from
/// tab-separated `error<TAB>correction` lines.
pub fn read_rewrites(reader: impl BufRead) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.starts_with('{') {
            let rule: EditRule = serde_json::from_str(trimmed)?;
            out.push((rule.original, rule.revised));
        } else {
            let (from, to) = line
                .split_once('\t')
                .ok_or_else(|| Error::invalid(format!("rewrite line {}: expected a tab", n + 1)))?;
            out.push((from.trim().to_owned(), to.trim().to_owned()));
        }
    }
    Ok(out)
}

pub fn load_reference_scorer(rules: Option<&Path>, lm_corpus: &Path, penalty: f64) -> Result<ReferenceScorer> {
    let rewrites = match rules {
        Some(p) => read_rewrites(BufReader::new(File::open(p)?))?,
        None => Vec::new(),
    };
    let text = std::fs::read_to_string(lm_corpus)?;
    let lm = BigramModel::from_sentences(text.lines());
    Ok(ReferenceScorer::new(rewrites.iter().map(|(a, b)| (a.as_str(), b.as_str())), lm, penalty))
}
