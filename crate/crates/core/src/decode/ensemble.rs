use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Hypothesis, Scorer};
use crate::error::{Error, Result};

/// End-of-sequence token emitted by step models.
pub const EOS: &str = "</s>";

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    probabilities: BTreeMap<String, f64>,
}

impl StepDistribution {
    pub fn new(probabilities: BTreeMap<String, f64>) -> Result<Self> {
        if probabilities.values().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("step probabilities must be finite and non-negative"));
        }
        let total: f64 = probabilities.values().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("step probabilities sum to {total}")));
        }
        Ok(StepDistribution { probabilities })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(t, p)| (t.to_owned(), p)).collect())
    }

    pub fn get(&self, token: &str) -> f64 {
        self.probabilities.get(token).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probabilities.iter().map(|(t, &p)| (t.as_str(), p))
    }

    /// Highest-probability token; ties go to the smallest token.
    pub fn argmax(&self) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (t, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((t, p));
            }
        }
        best.map(|(t, _)| t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    #[default]
    Geometric,
    Arithmetic,
}

fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

pub fn ensemble_distributions(dists: &[StepDistribution], mode: EnsembleMode) -> Result<StepDistribution> {
    let (first, rest) =
        dists.split_first().ok_or_else(|| Error::invalid("cannot ensemble an empty list of distributions"))?;
    if rest.iter().any(|d| !d.probabilities.keys().eq(first.probabilities.keys())) {
        return Err(Error::invalid("ensemble members disagree on the token set"));
    }
    if rest.is_empty() {
        return Ok(first.clone());
    }
    let k = dists.len() as f64;
    let mut combined: BTreeMap<String, f64> = BTreeMap::new();
    for token in first.probabilities.keys() {
        let values: Vec<f64> = dists.iter().map(|d| d.probabilities[token]).collect();
        let value = match mode {
            EnsembleMode::Arithmetic => sorted_sum(values) / k,
            EnsembleMode::Geometric => {
                if values.contains(&0.0) {
                    0.0
                } else {
                    (sorted_sum(values.iter().map(|p| p.ln()).collect()) / k).exp()
                }
            }
        };
        combined.insert(token.clone(), value);
    }
    let total = sorted_sum(combined.values().copied().collect());
    if total <= 0.0 {
        return Err(Error::invalid("ensemble members share no token with non-zero probability"));
    }
    for p in combined.values_mut() {
        *p /= total;
    }
    Ok(StepDistribution { probabilities: combined })
}

/// A left-to-right model giving the next-token distribution for a source
/// and the tokens generated so far.
pub trait StepModel: Send + Sync {
    fn next_distribution(&self, source: &str, prefix: &[String]) -> Result<StepDistribution>;
}

impl<M: StepModel + ?Sized> StepModel for Box<M> {
    fn next_distribution(&self, source: &str, prefix: &[String]) -> Result<StepDistribution> {
        (**self).next_distribution(source, prefix)
    }
}

impl<M: StepModel + ?Sized> StepModel for &M {
    fn next_distribution(&self, source: &str, prefix: &[String]) -> Result<StepDistribution> {
        (**self).next_distribution(source, prefix)
    }
}

/// Combines members inside one shared beam, step by step.
pub struct EnsembleModel<M> {
    members: Vec<M>,
    mode: EnsembleMode,
}

impl<M: StepModel> EnsembleModel<M> {
    pub fn new(members: Vec<M>, mode: EnsembleMode) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("an ensemble needs at least one member"));
        }
        Ok(EnsembleModel { members, mode })
    }
}

impl<M: StepModel> StepModel for EnsembleModel<M> {
    fn next_distribution(&self, source: &str, prefix: &[String]) -> Result<StepDistribution> {
        let dists = self.members.iter().map(|m| m.next_distribution(source, prefix)).collect::<Result<Vec<_>>>()?;
        ensemble_distributions(&dists, self.mode)
    }
}

/// Beam search over a [`StepModel`]. Tokens are joined with single spaces.
pub struct BeamSearchScorer<M> {
    model: M,
    max_len: usize,
}

impl<M: StepModel> BeamSearchScorer<M> {
    pub fn new(model: M, max_len: usize) -> Self {
        BeamSearchScorer { model, max_len }
    }
}

type Partial = (Vec<String>, f64);

fn by_cost(a: &Partial, b: &Partial) -> std::cmp::Ordering {
    a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0))
}

impl<M: StepModel> Scorer for BeamSearchScorer<M> {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
        let mut live: Vec<Partial> = vec![(Vec::new(), 0.0)];
        let mut finished: Vec<Partial> = Vec::new();
        for _ in 0..self.max_len {
            let mut candidates = Vec::new();
            for (prefix, cost) in &live {
                let dist = self.model.next_distribution(input, prefix)?;
                for (token, p) in dist.iter().filter(|&(_, p)| p > 0.0) {
                    let mut tokens = prefix.clone();
                    tokens.push(token.to_owned());
                    candidates.push((tokens, cost - p.ln()));
                }
            }
            candidates.sort_by(by_cost);
            candidates.truncate(beam);
            live.clear();
            for (mut tokens, cost) in candidates {
                if tokens.last().map(String::as_str) == Some(EOS) {
                    tokens.pop();
                    finished.push((tokens, cost));
                } else {
                    live.push((tokens, cost));
                }
            }
            finished.sort_by(by_cost);
            finished.truncate(beam);
            // Costs never decrease along a path.
            let cheapest_live = live.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            if live.is_empty() || (finished.len() == beam && finished[beam - 1].1 <= cheapest_live) {
                break;
            }
        }
        if finished.is_empty() {
            finished = live;
        }
        finished.sort_by(by_cost);
        let mut out: Vec<Hypothesis> = Vec::new();
        for (tokens, cost) in finished {
            let text = tokens.join(" ");
            if out.iter().all(|h| h.text != text) {
                out.push(Hypothesis::new(text, cost.max(0.0)));
            }
        }
        out.truncate(beam);
        Ok(out)
    }
}

/// A beam-search scorer over the per-step ensemble of `members`.
pub fn ensemble_scorer<M: StepModel>(
    members: Vec<M>,
    mode: EnsembleMode,
    max_len: usize,
) -> Result<BeamSearchScorer<EnsembleModel<M>>> {
    Ok(BeamSearchScorer::new(EnsembleModel::new(members, mode)?, max_len))
}
