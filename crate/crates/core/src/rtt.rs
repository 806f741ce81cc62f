//! Round-trip translation corpus synthesis.

use std::collections::HashMap;
use std::time::Duration;

use log::debug;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::example::{ExamplePair, Provenance};
use crate::noise::{apply_edit_rules, corrupt_spelling, RuleIndex, SpellNoiseConfig};
use crate::rng::{self, stream};
use crate::text::token_spans;

pub const SOURCE_LANG: &str = "en";
pub const DEFAULT_IDENTITY_FRACTION: f64 = 0.025;

/// A machine translation backend.
pub trait TranslationProvider: Send + Sync {
    fn translate(&self, text: &str, source_lang: &str, target_lang: &str) -> Result<String>;
}

impl<P: TranslationProvider + ?Sized> TranslationProvider for &P {
    fn translate(&self, text: &str, source_lang: &str, target_lang: &str) -> Result<String> {
        (**self).translate(text, source_lang, target_lang)
    }
}

impl<P: TranslationProvider + ?Sized> TranslationProvider for Box<P> {
    fn translate(&self, text: &str, source_lang: &str, target_lang: &str) -> Result<String> {
        (**self).translate(text, source_lang, target_lang)
    }
}

/// One directional phrase substitution of a [`MockProvider`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockEntry {
    pub source: String,
    pub target: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Default)]
struct PhraseTable {
    phrases: HashMap<String, String>,
    max_words: usize,
}

/// Deterministic table-driven translator. Phrases not in the table for the
/// requested direction pass through unchanged.
#[derive(Debug, Default)]
pub struct MockProvider {
    tables: HashMap<(String, String), PhraseTable>,
}

impl MockProvider {
    pub fn new(entries: impl IntoIterator<Item = MockEntry>) -> Self {
        let mut tables: HashMap<(String, String), PhraseTable> = HashMap::new();
        for e in entries {
            let key: Vec<&str> = e.from.split_whitespace().collect();
            if key.is_empty() {
                continue;
            }
            let table = tables.entry((e.source, e.target)).or_default();
            table.max_words = table.max_words.max(key.len());
            table.phrases.insert(key.join(" "), e.to);
        }
        MockProvider { tables }
    }

    pub fn identity() -> Self {
        MockProvider::default()
    }
}

impl TranslationProvider for MockProvider {
    fn translate(&self, text: &str, source_lang: &str, target_lang: &str) -> Result<String> {
        let Some(table) = self.tables.get(&(source_lang.to_owned(), target_lang.to_owned())) else {
            return Ok(text.to_owned());
        };
        let spans = token_spans(text);
        let words: Vec<&str> = spans.iter().map(|r| &text[r.clone()]).collect();
        let mut out = String::with_capacity(text.len());
        let mut copied_to = 0;
        let mut i = 0;
        while i < words.len() {
            let longest = table.max_words.min(words.len() - i);
            let hit =
                (1..=longest).rev().find_map(|len| table.phrases.get(&words[i..i + len].join(" ")).map(|to| (len, to)));
            match hit {
                Some((len, to)) => {
                    out.push_str(&text[copied_to..spans[i].start]);
                    out.push_str(to);
                    copied_to = spans[i + len - 1].end;
                    i += len;
                }
                None => i += 1,
            }
        }
        out.push_str(&text[copied_to..]);
        Ok(out)
    }
}

#[derive(Serialize)]
struct TranslateRequest<'a> {
    text: &'a str,
    source: &'a str,
    target: &'a str,
}

#[derive(Deserialize)]
struct TranslateResponse {
    text: String,
}

/// Remote translator speaking
/// `POST {"text", "source", "target"} -> {"text"}`.
pub struct HttpProvider {
    endpoint: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, token: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpProvider { endpoint: endpoint.into(), token, agent }
    }
}

impl TranslationProvider for HttpProvider {
    fn translate(&self, text: &str, source_lang: &str, target_lang: &str) -> Result<String> {
        let mut request = self.agent.post(&self.endpoint);
        if let Some(token) = &self.token {
            request = request.header("Authorization", &format!("Bearer {token}"));
        }
        let body = TranslateRequest { text, source: source_lang, target: target_lang };
        let response: TranslateResponse = request
            .send_json(&body)
            .map_err(|e| Error::Provider(e.to_string()))?
            .body_mut()
            .read_json()
            .map_err(|e| Error::Provider(e.to_string()))?;
        Ok(response.text)
    }
}

/// en -> bridge -> en.
pub fn round_trip(text: &str, bridge_lang: &str, provider: &impl TranslationProvider) -> Result<String> {
    let out = provider.translate(text, SOURCE_LANG, bridge_lang)?;
    provider.translate(&out, bridge_lang, SOURCE_LANG)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RttConfig {
    pub bridge_lang: String,
    pub identity_fraction: f64,
    pub spell_noise: SpellNoiseConfig,
}

impl Default for RttConfig {
    fn default() -> Self {
        RttConfig {
            bridge_lang: "ja".into(),
            identity_fraction: DEFAULT_IDENTITY_FRACTION,
            spell_noise: SpellNoiseConfig::round_trip(),
        }
    }
}

impl RttConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.identity_fraction) {
            return Err(Error::config(format!("identity_fraction {} outside [0, 1]", self.identity_fraction)));
        }
        self.spell_noise.validate()
    }
}

/// A clean sentence plus the ids it should carry into the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanSentence {
    pub text: String,
    pub page_id: u64,
    pub older_rev: u64,
    pub newer_rev: u64,
}

impl From<&str> for CleanSentence {
    fn from(text: &str) -> Self {
        CleanSentence { text: text.to_owned(), page_id: 0, older_rev: 0, newer_rev: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RttOutcome {
    Pair(ExamplePair),
    Skipped { index: u64, reason: String },
}

/// Builds one output record. `index` is the sentence's position in the whole
/// input and keys every random draw.
pub fn build_rtt_pair(
    index: u64,
    sentence: &CleanSentence,
    config: &RttConfig,
    rules: &RuleIndex,
    provider: &impl TranslationProvider,
    seed: u64,
) -> RttOutcome {
    let t = &sentence.text;
    let make = |source: String| {
        RttOutcome::Pair(ExamplePair::new(
            source,
            t.clone(),
            sentence.page_id,
            sentence.older_rev,
            sentence.newer_rev,
            Provenance::RoundTrip,
        ))
    };
    if rng::unit_draw(seed, &[stream::RTT_IDENTITY, index]) < config.identity_fraction {
        return make(t.clone());
    }
    let translated = match round_trip(t, &config.bridge_lang, provider) {
        Ok(s) => s,
        Err(e) => {
            debug!("sentence {index} skipped: {e}");
            return RttOutcome::Skipped { index, reason: e.to_string() };
        }
    };
    let mut spell_rng = rng::rng_for(seed, &[stream::SPELLING, index]);
    let noisy = corrupt_spelling(&translated, &config.spell_noise, &mut spell_rng);
    let mut rule_rng = rng::rng_for(seed, &[stream::RULES, index]);
    make(apply_edit_rules(&noisy, rules, &mut rule_rng))
}

/// Builds a batch whose first sentence has global index `first_index`.
/// Provider calls run on the current rayon pool; output keeps input order.
pub fn build_rtt_corpus(
    sentences: &[CleanSentence],
    first_index: u64,
    config: &RttConfig,
    rules: &RuleIndex,
    provider: &impl TranslationProvider,
    seed: u64,
) -> Vec<RttOutcome> {
    sentences
        .par_iter()
        .enumerate()
        .map(|(i, s)| build_rtt_pair(first_index + i as u64, s, config, rules, provider, seed))
        .collect()
}
