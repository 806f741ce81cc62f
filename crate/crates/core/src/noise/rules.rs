use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::extract::align;
use crate::text::{levenshtein, token_spans};

/// A corruption rule: with `probability`, a writer who meant `revised`
/// typed `original`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditRule {
    pub original: String,
    pub revised: String,
    /// Number of extracted edits `original -> revised`.
    pub count_joint: u64,
    /// Occurrences of `revised` in the revised (target) text.
    pub count_revised: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RuleExtractionConfig {
    pub max_words: usize,
    /// Character edit distance must not exceed this fraction of the longer
    /// phrase's length.
    pub max_char_distance_fraction: f64,
}

impl Default for RuleExtractionConfig {
    fn default() -> Self {
        RuleExtractionConfig { max_words: 3, max_char_distance_fraction: 0.5 }
    }
}

fn is_clean(words: &[&str]) -> bool {
    words.iter().all(|w| !w.chars().any(|c| c.is_numeric() || c.is_uppercase()))
}

fn close_enough(original: &str, revised: &str, fraction: f64) -> bool {
    let a: Vec<char> = original.chars().collect();
    let b: Vec<char> = revised.chars().collect();
    let longest = a.len().max(b.len());
    levenshtein(&a, &b) as f64 <= fraction * longest as f64
}

/// Mines `(original, revised)` phrase edits from aligned pairs and estimates
/// `P(original | revised) = C(original, revised) / C(revised)`.
///
/// Input pairs are `(source, target)`: the source holds what was written,
/// the target what it was revised to.
pub fn extract_edit_rules<I, S, T>(pairs: I, config: &RuleExtractionConfig) -> Vec<EditRule>
where
    I: IntoIterator<Item = (S, T)>,
    S: AsRef<str>,
    T: AsRef<str>,
{
    let max_words = config.max_words.max(1);
    let mut joint: BTreeMap<(String, String), u64> = BTreeMap::new();
    let mut phrase_counts: HashMap<String, u64> = HashMap::new();

    for (source, target) in pairs {
        let src: Vec<&str> = source.as_ref().split_whitespace().collect();
        let tgt: Vec<&str> = target.as_ref().split_whitespace().collect();
        for n in 1..=max_words {
            for window in tgt.windows(n) {
                if is_clean(window) {
                    *phrase_counts.entry(window.join(" ")).or_default() += 1;
                }
            }
        }
        for span in align(&src, &tgt) {
            if span.is_matched() {
                continue;
            }
            let original = &src[span.old.clone()];
            let revised = &tgt[span.new.clone()];
            let sizes_ok = |w: &[&str]| (1..=max_words).contains(&w.len());
            if !(sizes_ok(original) && sizes_ok(revised) && is_clean(original) && is_clean(revised)) {
                continue;
            }
            let (original, revised) = (original.join(" "), revised.join(" "));
            if close_enough(&original, &revised, config.max_char_distance_fraction) {
                *joint.entry((original, revised)).or_default() += 1;
            }
        }
    }

    let mut rules: Vec<EditRule> = joint
        .into_iter()
        .map(|((original, revised), count_joint)| {
            let count_revised = phrase_counts.get(&revised).copied().unwrap_or(count_joint);
            EditRule {
                probability: count_joint as f64 / count_revised as f64,
                original,
                revised,
                count_joint,
                count_revised,
            }
        })
        .collect();
    rules.sort_by(|a, b| (&a.revised, &a.original).cmp(&(&b.revised, &b.original)));
    rules
}

/// Rules keyed by their revised phrase.
#[derive(Debug, Clone, Default)]
pub struct RuleIndex {
    by_revised: HashMap<String, Vec<(String, f64)>>,
    max_words: usize,
}

impl RuleIndex {
    pub fn new(rules: &[EditRule]) -> Self {
        let mut index = RuleIndex::default();
        for rule in rules {
            let key = rule.revised.split_whitespace().collect::<Vec<_>>().join(" ");
            if key.is_empty() || !(rule.probability > 0.0) {
                continue;
            }
            index.max_words = index.max_words.max(key.split(' ').count());
            index.by_revised.entry(key).or_default().push((rule.original.clone(), rule.probability));
        }
        for candidates in index.by_revised.values_mut() {
            candidates.sort_by(|a, b| a.0.cmp(&b.0));
        }
        index
    }

    pub fn is_empty(&self) -> bool {
        self.by_revised.is_empty()
    }
}

/// Scans left to right for revised phrases at word boundaries, longest
/// match first, and replaces each match by a sampled original. Replaced text
/// is not rescanned; whitespace outside replaced spans is kept verbatim.
pub fn apply_edit_rules(text: &str, rules: &RuleIndex, rng: &mut impl Rng) -> String {
    if rules.is_empty() {
        return text.to_owned();
    }
    let spans = token_spans(text);
    let words: Vec<&str> = spans.iter().map(|r| &text[r.clone()]).collect();
    let mut out = String::with_capacity(text.len());
    let mut copied_to = 0;
    let mut i = 0;
    while i < words.len() {
        let longest = rules.max_words.min(words.len() - i);
        let hit =
            (1..=longest).rev().find_map(|len| rules.by_revised.get(&words[i..i + len].join(" ")).map(|c| (len, c)));
        let Some((len, candidates)) = hit else {
            i += 1;
            continue;
        };
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let chosen = candidates.iter().find(|(_, p)| {
            acc += p;
            u < acc
        });
        match chosen {
            Some((original, _)) => {
                out.push_str(&text[copied_to..spans[i].start]);
                out.push_str(original);
                copied_to = spans[i + len - 1].end;
                i += len;
            }
            None => i += 1,
        }
    }
    out.push_str(&text[copied_to..]);
    out
}
