use std::io::{BufRead, Write};
use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use super::{PipelineConfig, ProviderSettings};
use crate::error::{Error, Result};
use crate::example::ExamplePair;
use crate::noise::{extract_edit_rules, EditRule, RuleExtractionConfig, RuleIndex};
use crate::rtt::{
    build_rtt_corpus, CleanSentence, HttpProvider, MockEntry, MockProvider, RttOutcome, TranslationProvider,
};
use crate::text::word_count;

const BATCH: usize = 256;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RttSummary {
    pub input_sentences: u64,
    pub sentences: u64,
    pub words: u64,
    pub identities: u64,
    pub identity_fraction: f64,
    pub skipped: u64,
    pub edit_rules: u64,
}

/// A clean-text line: either plain text or an example-pair record whose
/// target side is used.
pub fn parse_clean_line(line: &str) -> Result<Option<CleanSentence>> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    if trimmed.starts_with('{') {
        let pair: ExamplePair = serde_json::from_str(trimmed)?;
        return Ok(Some(CleanSentence {
            text: pair.target,
            page_id: pair.page_id,
            older_rev: pair.older_rev,
            newer_rev: pair.newer_rev,
        }));
    }
    Ok(Some(CleanSentence::from(trimmed)))
}

pub fn read_edit_rules(reader: impl BufRead) -> Result<Vec<EditRule>> {
    let mut rules = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            rules.push(serde_json::from_str(&line)?);
        }
    }
    Ok(rules)
}

pub fn write_edit_rules(rules: &[EditRule], out: &mut impl Write) -> Result<()> {
    for rule in rules {
        writeln!(out, "{}", serde_json::to_string(rule)?)?;
    }
    Ok(())
}

/// Mines edit rules from the non-identity pairs of an example-pair corpus.
pub fn mine_edit_rules(corpus: impl BufRead, config: &RuleExtractionConfig) -> Result<Vec<EditRule>> {
    let mut pairs = Vec::new();
    for line in corpus.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: ExamplePair = serde_json::from_str(&line)?;
        if !pair.is_identity {
            pairs.push((pair.source, pair.target));
        }
    }
    Ok(extract_edit_rules(pairs.iter().map(|(s, t)| (s.as_str(), t.as_str())), config))
}

pub fn load_mock_table(path: &Path) -> Result<Vec<MockEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Builds the configured provider: a mock table if one is named, otherwise
/// the HTTP endpoint.
pub fn make_provider(settings: &ProviderSettings) -> Result<Box<dyn TranslationProvider>> {
    if let Some(path) = &settings.mock_table {
        return Ok(Box::new(MockProvider::new(load_mock_table(path)?)));
    }
    let Some(endpoint) = &settings.endpoint else {
        return Err(Error::config("no translation provider configured: set rtt.provider.endpoint or mock_table"));
    };
    let token = std::env::var(&settings.token_env).ok();
    Ok(Box::new(HttpProvider::new(endpoint.clone(), token, Duration::from_secs(settings.timeout_secs))))
}

/// Round-trips every clean sentence of `input` and writes example pairs.
pub fn run_build_rtt(
    config: &PipelineConfig,
    input: impl BufRead,
    rules: &[EditRule],
    provider: &dyn TranslationProvider,
    out: &mut impl Write,
) -> Result<RttSummary> {
    config.validate()?;
    let rtt = config.rtt_config();
    let index = RuleIndex::new(rules);
    let threads = match config.workers {
        0 => config.rtt.provider.max_in_flight,
        w => w.min(config.rtt.provider.max_in_flight),
    };
    let pool = super::worker_pool(threads)?;
    let mut summary = RttSummary { edit_rules: rules.len() as u64, ..RttSummary::default() };
    let mut lines = input.lines();
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        for line in lines.by_ref() {
            if let Some(s) = parse_clean_line(&line?)? {
                batch.push(s);
                if batch.len() == BATCH {
                    break;
                }
            }
        }
        if batch.is_empty() {
            break;
        }
        let first = summary.input_sentences;
        summary.input_sentences += batch.len() as u64;
        let outcomes = pool.install(|| build_rtt_corpus(&batch, first, &rtt, &index, &provider, config.global_seed));
        for outcome in outcomes {
            match outcome {
                RttOutcome::Pair(pair) => {
                    writeln!(out, "{}", pair.to_json_line())?;
                    summary.sentences += 1;
                    summary.words += word_count(&pair.target) as u64;
                    summary.identities += u64::from(pair.is_identity);
                }
                RttOutcome::Skipped { .. } => summary.skipped += 1,
            }
        }
    }
    out.flush()?;
    summary.identity_fraction = super::fraction(summary.identities, summary.sentences);
    Ok(summary)
}
