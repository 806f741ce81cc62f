use std::collections::BTreeSet;

use serde::Serialize;

use super::{Edit, GoldEdit};
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.5;

/// Corpus-level scores as fractions in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gleu: Option<f64>,
    pub matches: usize,
    pub system_edits: usize,
    pub gold_edits: usize,
}

/// `(1 + b^2) p r / (b^2 p + r)`, zero when both inputs are zero. Works
/// on fractions or percentages alike.
pub fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

fn matches(system: &BTreeSet<&Edit>, gold: &[GoldEdit]) -> usize {
    system
        .iter()
        .filter(|s| gold.iter().any(|g| g.start == s.start && g.end == s.end && g.corrections.contains(&s.replacement)))
        .count()
}

/// Scores system edits against per-annotator gold edits. For each sentence
/// the annotator with the most matches is used; ties go to the annotator
/// with fewer gold edits, then the lower index.
pub fn score_edits(system: &[Vec<Edit>], gold: &[Vec<Vec<GoldEdit>>], beta: f64) -> Result<MetricReport> {
    if system.len() != gold.len() {
        return Err(Error::invalid(format!("{} system sentences against {} gold sentences", system.len(), gold.len())));
    }
    let (mut matched, mut proposed, mut wanted) = (0, 0, 0);
    for (sys, annotators) in system.iter().zip(gold) {
        let sys: BTreeSet<&Edit> = sys.iter().collect();
        let best = annotators
            .iter()
            .map(|g| (matches(&sys, g), g.len()))
            .min_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)))
            .unwrap_or((0, 0));
        matched += best.0;
        wanted += best.1;
        proposed += sys.len();
    }
    let (precision, recall) = match (proposed, wanted) {
        (0, 0) => (1.0, 1.0),
        (0, _) => (0.0, 0.0),
        (_, 0) => (0.0, 1.0),
        (p, g) => (matched as f64 / p as f64, matched as f64 / g as f64),
    };
    Ok(MetricReport {
        precision,
        recall,
        f_beta: f_beta(precision, recall, beta),
        beta,
        gleu: None,
        matches: matched,
        system_edits: proposed,
        gold_edits: wanted,
    })
}
