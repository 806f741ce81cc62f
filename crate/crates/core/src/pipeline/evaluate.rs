use std::io::BufRead;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::example::ExamplePair;
use crate::metrics::{corpus_gleu, extract_edits, score_edits, M2Sentence, MetricReport, DEFAULT_MAX_ORDER};
use crate::subword::SubwordModel;

fn split(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

/// F-beta of hypotheses (one tokenised sentence per line) against M2 gold.
pub fn evaluate_m2(gold: &[M2Sentence], hypotheses: &[String], beta: f64) -> Result<MetricReport> {
    if gold.len() != hypotheses.len() {
        return Err(Error::invalid(format!("{} hypotheses for {} gold sentences", hypotheses.len(), gold.len())));
    }
    let system: Vec<_> = gold.iter().zip(hypotheses).map(|(g, h)| extract_edits(&g.source, &split(h))).collect();
    let annotations: Vec<_> = gold.iter().map(M2Sentence::gold).collect();
    score_edits(&system, &annotations, beta)
}

/// Corpus GLEU. `references[k][i]` is reference set `k` for sentence `i`.
pub fn evaluate_gleu(sources: &[String], hypotheses: &[String], references: &[Vec<String>]) -> Result<f64> {
    if references.is_empty() {
        return Err(Error::invalid("GLEU needs at least one reference set"));
    }
    if hypotheses.len() != sources.len() || references.iter().any(|r| r.len() != sources.len()) {
        return Err(Error::invalid("source, hypothesis and reference files differ in length"));
    }
    let toks = |v: &[String]| v.iter().map(|s| split(s)).collect::<Vec<_>>();
    let (s, h) = (toks(sources), toks(hypotheses));
    let refs: Vec<Vec<Vec<String>>> =
        (0..sources.len()).map(|i| references.iter().map(|set| split(&set[i])).collect()).collect();
    let items: Vec<(&[String], &[String], &[Vec<String>])> =
        (0..sources.len()).map(|i| (&s[i][..], &h[i][..], &refs[i][..])).collect();
    Ok(corpus_gleu(&items, DEFAULT_MAX_ORDER))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubwordSummary {
    pub lines: u64,
    pub vocab_size: usize,
    pub merges: usize,
}

/// Trains a wordpiece model on plain text lines or on both sides of
/// example-pair records.
pub fn train_subword(corpus: impl BufRead, vocab_size: usize) -> Result<(SubwordModel, SubwordSummary)> {
    let mut texts = Vec::new();
    for line in corpus.lines() {
        let line = line?;
        if line.trim_start().starts_with('{') {
            let pair: ExamplePair = serde_json::from_str(&line)?;
            texts.push(pair.source);
            texts.push(pair.target);
        } else {
            texts.push(line);
        }
    }
    let model = SubwordModel::train(&texts, vocab_size)?;
    let summary =
        SubwordSummary { lines: texts.len() as u64, vocab_size: model.vocab_size(), merges: model.merges().len() };
    Ok((model, summary))
}

/// Reads every line of a text file.
pub fn read_lines(reader: impl BufRead) -> Result<Vec<String>> {
    Ok(reader.lines().collect::<std::io::Result<_>>()?)
}
