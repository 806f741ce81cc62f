use std::collections::HashMap;

use super::{Hypothesis, Scorer};
use crate::error::Result;
use crate::noise::EditRule;
use crate::text::token_spans;

pub const DEFAULT_CHANNEL_PENALTY: f64 = 1.0;

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const MAX_CANDIDATES: usize = 256;

/// Add-one smoothed word bigram model with sentence boundary markers.
#[derive(Debug, Clone, Default)]
pub struct BigramModel {
    bigrams: HashMap<(String, String), u64>,
    contexts: HashMap<String, u64>,
    /// Outcome space: observed types, `</s>`, and one unknown slot.
    outcomes: u64,
}

impl BigramModel {
    pub fn from_sentences<'a>(sentences: impl IntoIterator<Item = &'a str>) -> Self {
        let mut model = BigramModel::default();
        let mut types = std::collections::HashSet::new();
        for sentence in sentences {
            let mut prev = BOS;
            for word in sentence.split_whitespace().chain([EOS]) {
                types.insert(word.to_owned());
                *model.bigrams.entry((prev.to_owned(), word.to_owned())).or_default() += 1;
                *model.contexts.entry(prev.to_owned()).or_default() += 1;
                prev = word;
            }
        }
        types.insert(EOS.to_owned());
        model.outcomes = types.len() as u64 + 1;
        model
    }

    pub fn probability(&self, prev: &str, word: &str) -> f64 {
        let joint = self.bigrams.get(&(prev.to_owned(), word.to_owned())).copied().unwrap_or(0);
        let context = self.contexts.get(prev).copied().unwrap_or(0);
        (joint + 1) as f64 / (context + self.outcomes.max(1)) as f64
    }

    /// Negative log probability of a whitespace-tokenised sentence.
    pub fn cost(&self, sentence: &str) -> f64 {
        let mut prev = BOS;
        let mut cost = 0.0;
        for word in sentence.split_whitespace().chain([EOS]) {
            cost -= self.probability(prev, word).ln();
            prev = word;
        }
        cost
    }
}

#[derive(Debug, Clone)]
struct Rewrite {
    from: Vec<String>,
    to: String,
}

/// Noisy-channel scorer: candidates come from phrase rewrites, cost is the
/// language model cost plus a fixed penalty per applied rewrite.
#[derive(Debug, Clone)]
pub struct ReferenceScorer {
    rewrites: Vec<Rewrite>,
    lm: BigramModel,
    channel_penalty: f64,
}

impl ReferenceScorer {
    /// `rules` are (erroneous phrase, correction) pairs.
    pub fn new<'a>(rules: impl IntoIterator<Item = (&'a str, &'a str)>, lm: BigramModel, channel_penalty: f64) -> Self {
        let mut rewrites: Vec<Rewrite> = rules
            .into_iter()
            .filter_map(|(from, to)| {
                let from: Vec<String> = from.split_whitespace().map(str::to_owned).collect();
                let to = to.split_whitespace().collect::<Vec<_>>().join(" ");
                (!from.is_empty() && !to.is_empty()).then_some(Rewrite { from, to })
            })
            .collect();
        rewrites.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
        rewrites.dedup_by(|a, b| a.from == b.from && a.to == b.to);
        ReferenceScorer { rewrites, lm, channel_penalty }
    }

    /// Uses mined rules in the correcting direction, original to revised.
    pub fn from_edit_rules(rules: &[EditRule], lm: BigramModel, channel_penalty: f64) -> Self {
        Self::new(rules.iter().map(|r| (r.original.as_str(), r.revised.as_str())), lm, channel_penalty)
    }

    fn candidates(&self, input: &str) -> Vec<(String, usize)> {
        let spans = token_spans(input);
        let words: Vec<&str> = spans.iter().map(|r| &input[r.clone()]).collect();
        // (first word, word count, replacement)
        let mut sites: Vec<(usize, usize, &str)> = Vec::new();
        for i in 0..words.len() {
            for r in &self.rewrites {
                let end = i + r.from.len();
                if end <= words.len() && r.from.iter().zip(&words[i..end]).all(|(a, b)| a == b) {
                    sites.push((i, r.from.len(), &r.to));
                }
            }
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        choose(&sites, 0, 0, &mut chosen, &mut |picked: &[usize]| {
            let mut text = String::with_capacity(input.len());
            let mut copied_to = 0;
            for &s in picked {
                let (i, len, to) = sites[s];
                text.push_str(&input[copied_to..spans[i].start]);
                text.push_str(to);
                copied_to = spans[i + len - 1].end;
            }
            text.push_str(&input[copied_to..]);
            out.push((text, picked.len()));
            out.len() < MAX_CANDIDATES
        });
        out
    }
}

/// Enumerates non-overlapping subsets of `sites` (sorted by start) in
/// depth-first order until `emit` returns false.
fn choose(
    sites: &[(usize, usize, &str)],
    next: usize,
    free_from: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if next == sites.len() {
        return emit(chosen);
    }
    if !choose(sites, next + 1, free_from, chosen, emit) {
        return false;
    }
    let (start, len, _) = sites[next];
    if start >= free_from {
        chosen.push(next);
        let go_on = choose(sites, next + 1, start + len, chosen, emit);
        chosen.pop();
        return go_on;
    }
    true
}

impl Scorer for ReferenceScorer {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
        let mut scored: Vec<Hypothesis> = self
            .candidates(input)
            .into_iter()
            .map(|(text, edits)| {
                let cost = self.lm.cost(&text) + self.channel_penalty * edits as f64;
                Hypothesis::new(text, cost)
            })
            .collect();
        scored.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.text.cmp(&b.text)));
        scored.dedup_by(|a, b| a.text == b.text);
        let identity = scored.iter().position(|h| h.text == input).expect("the empty subset is always emitted");
        if identity >= beam.max(1) {
            let keep = scored.swap_remove(identity);
            scored.truncate(beam.max(1) - 1);
            scored.push(keep);
        } else {
            scored.truncate(beam.max(1));
        }
        Ok(scored)
    }
}
