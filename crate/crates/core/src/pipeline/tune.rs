use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::{iterative_decode_traced, DecodeConfig, Scorer};
use crate::error::{Error, Result};
use crate::metrics::{corpus_gleu, extract_edits, score_edits, GoldEdit, M2Sentence, DEFAULT_BETA, DEFAULT_MAX_ORDER};
use crate::rng::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuneMetric {
    FBeta,
    Gleu,
}

/// Tokenised development sentences with gold edits, references, or both.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DevSet {
    pub sources: Vec<Vec<String>>,
    pub gold: Option<Vec<Vec<Vec<GoldEdit>>>>,
    pub references: Option<Vec<Vec<Vec<String>>>>,
}

fn split(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

impl DevSet {
    pub fn from_m2(sentences: &[M2Sentence]) -> Self {
        DevSet {
            sources: sentences.iter().map(|s| s.source.clone()).collect(),
            gold: Some(sentences.iter().map(M2Sentence::gold).collect()),
            references: None,
        }
    }

    /// `references[i]` holds every reference for source `i`.
    pub fn from_references(sources: &[String], references: &[Vec<String>]) -> Result<Self> {
        if sources.len() != references.len() {
            return Err(Error::invalid("source and reference counts differ"));
        }
        Ok(DevSet {
            sources: sources.iter().map(|s| split(s)).collect(),
            gold: None,
            references: Some(references.iter().map(|r| r.iter().map(|x| split(x)).collect()).collect()),
        })
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Whether the gold data changes sentence `i`.
    pub fn is_modified(&self, i: usize) -> bool {
        if let Some(gold) = &self.gold {
            return gold[i].iter().any(|a| !a.is_empty());
        }
        if let Some(refs) = &self.references {
            return refs[i].iter().any(|r| *r != self.sources[i]);
        }
        false
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let pick = |v: &Vec<_>| indices.iter().map(|&i| Clone::clone(&v[i])).collect();
        DevSet {
            sources: pick(&self.sources),
            gold: self.gold.as_ref().map(|g| indices.iter().map(|&i| g[i].clone()).collect()),
            references: self.references.as_ref().map(|r| indices.iter().map(|&i| r[i].clone()).collect()),
        }
    }

    /// Scores one hypothesis per sentence.
    pub fn score(&self, hypotheses: &[Vec<String>], metric: TuneMetric) -> Result<f64> {
        match metric {
            TuneMetric::FBeta => {
                let gold = self.gold.as_ref().ok_or_else(|| Error::invalid("F-beta needs gold edits"))?;
                let system: Vec<_> = self.sources.iter().zip(hypotheses).map(|(s, h)| extract_edits(s, h)).collect();
                Ok(score_edits(&system, gold, DEFAULT_BETA)?.f_beta)
            }
            TuneMetric::Gleu => {
                let refs = self.references.as_ref().ok_or_else(|| Error::invalid("GLEU needs references"))?;
                let items: Vec<(&[String], &[String], &[Vec<String>])> =
                    self.sources.iter().zip(hypotheses).zip(refs).map(|((s, h), r)| (&s[..], &h[..], &r[..])).collect();
                Ok(corpus_gleu(&items, DEFAULT_MAX_ORDER))
            }
        }
    }
}

/// Picks `size` sentence indices, a `modified_ratio` share of them among
/// the sentences that have corrections. Returns sorted indices.
pub fn sample_dev_subset(modified: &[bool], modified_ratio: f64, size: usize, seed: u64) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&modified_ratio) {
        return Err(Error::config(format!("modified ratio {modified_ratio} is not a fraction")));
    }
    let (mut changed, mut unchanged): (Vec<usize>, Vec<usize>) = (0..modified.len()).partition(|&i| modified[i]);
    let want_changed = (size as f64 * modified_ratio).round() as usize;
    let want_unchanged = size - want_changed.min(size);
    if want_changed > changed.len() || want_unchanged > unchanged.len() {
        return Err(Error::invalid(format!(
            "cannot draw {want_changed} modified and {want_unchanged} unmodified sentences from {} and {}",
            changed.len(),
            unchanged.len()
        )));
    }
    let mut rng = rng::rng_for(seed, &[stream::DEV_SAMPLE]);
    changed.shuffle(&mut rng);
    unchanged.shuffle(&mut rng);
    let mut out: Vec<usize> = changed[..want_changed].iter().chain(&unchanged[..want_unchanged]).copied().collect();
    out.sort_unstable();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub threshold: f64,
    pub iterations: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub best_threshold: f64,
    pub best_iterations: usize,
    pub best_score: f64,
    pub table: Vec<GridPoint>,
}

/// Scores iterative decoding at every (threshold, iterations) grid point
/// and returns the best; ties go to the smaller threshold, then to fewer
/// iterations.
pub fn tune_threshold(
    dev: &DevSet,
    scorer: &dyn Scorer,
    beam: usize,
    thresholds: &[f64],
    iterations: &[usize],
    metric: TuneMetric,
) -> Result<TuneResult> {
    let mut thresholds = thresholds.to_vec();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let mut iterations = iterations.to_vec();
    iterations.sort_unstable();
    iterations.dedup();
    let (Some(&max_iter), false) = (iterations.last(), thresholds.is_empty()) else {
        return Err(Error::config("threshold and iteration grids must be non-empty"));
    };
    let inputs: Vec<String> = dev.sources.iter().map(|s| s.join(" ")).collect();
    let mut table = Vec::with_capacity(thresholds.len() * iterations.len());
    for &threshold in &thresholds {
        let config = DecodeConfig { beam, threshold, max_iter };
        let outcomes =
            inputs.par_iter().map(|s| iterative_decode_traced(s, &scorer, &config)).collect::<Result<Vec<_>>>()?;
        for &k in &iterations {
            let hypotheses: Vec<Vec<String>> = outcomes.iter().map(|o| split(o.output_after(k))).collect();
            table.push(GridPoint { threshold, iterations: k, score: dev.score(&hypotheses, metric)? });
        }
    }
    let best = table.iter().fold(&table[0], |best, p| if p.score > best.score { p } else { best });
    Ok(TuneResult { best_threshold: best.threshold, best_iterations: best.iterations, best_score: best.score, table })
}
