mod common;

use gecgen::noise::RuleExtractionConfig;
use gecgen::pipeline::{
    corpus_stats, load_mock_table, mine_edit_rules, read_edit_rules, run_build_rtt, PipelineConfig,
};
use gecgen::rtt::{round_trip, HttpProvider, MockProvider, TranslationProvider};
use gecgen::{Error, ExamplePair, Provenance};
use std::fs::File;
use std::io::BufReader;
use std::time::Duration;

struct Offline;

impl TranslationProvider for Offline {
    fn translate(&self, _: &str, _: &str, _: &str) -> gecgen::Result<String> {
        Err(Error::Provider("offline".into()))
    }
}

fn mock() -> MockProvider {
    MockProvider::new(load_mock_table(&common::fixture("mock_table.json")).unwrap())
}

fn rules() -> Vec<gecgen::noise::EditRule> {
    read_edit_rules(BufReader::new(File::open(common::fixture("rtt_rules.jsonl")).unwrap())).unwrap()
}

fn build(config: &PipelineConfig, provider: &dyn TranslationProvider) -> (String, gecgen::pipeline::RttSummary) {
    let input = common::read_fixture("clean_sentences.txt");
    let mut out = Vec::new();
    let summary = run_build_rtt(config, input.as_bytes(), &rules(), provider, &mut out).unwrap();
    (String::from_utf8(out).unwrap(), summary)
}

#[test]
fn mock_fixture_matches_golden() {
    let (out, summary) = build(&common::fixture_config(), &mock());
    assert_eq!(out, common::read_fixture("rtt_golden.jsonl"));
    assert_eq!((summary.input_sentences, summary.sentences, summary.skipped), (20, 20, 0));
}

#[test]
fn worker_count_does_not_change_output() {
    let mut config = common::fixture_config();
    let mut outs = Vec::new();
    for workers in [1, 3, 8] {
        config.workers = workers;
        outs.push(build(&config, &mock()).0);
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn all_identities() {
    let mut config = common::fixture_config();
    config.rtt.identity_fraction = 1.0;
    let (out, summary) = build(&config, &mock());
    assert_eq!(summary.identity_fraction, 1.0);
    for line in out.lines() {
        let pair: ExamplePair = serde_json::from_str(line).unwrap();
        assert_eq!(pair.source, pair.target);
        assert_eq!(pair.provenance, Provenance::RoundTrip);
    }
}

#[test]
fn failing_provider_skips_everything() {
    let mut config = common::fixture_config();
    config.rtt.identity_fraction = 0.0;
    let (out, summary) = build(&config, &Offline);
    assert!(out.is_empty());
    assert_eq!(summary.skipped, 20);
    assert_eq!(summary.sentences, 0);
}

#[test]
fn identity_draws_need_no_provider() {
    let (out, summary) = build(&common::fixture_config(), &Offline);
    assert_eq!(summary.sentences + summary.skipped, 20);
    assert_eq!(summary.identities, summary.sentences);
    let golden_identities = common::read_fixture("rtt_golden.jsonl").lines().filter(|l| out.contains(*l)).count();
    assert_eq!(golden_identities as u64, summary.sentences);
}

#[test]
fn bridge_drift_and_targets() {
    let mut config = common::fixture_config();
    config.rtt.identity_fraction = 0.0;
    config.rtt.spelling.rate = 0.0;
    let (out, _) = build(&config, &mock());
    let pairs: Vec<ExamplePair> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let clean = common::read_fixture("clean_sentences.txt");
    assert_eq!(pairs.iter().map(|p| p.target.as_str()).collect::<Vec<_>>(), clean.lines().collect::<Vec<_>>());
    assert_eq!(pairs[0].source, "The last appearance of the band was in 1998.");
    assert_eq!(pairs[3].source, "They are go to the market tomorrow.");
}

#[test]
fn example_pair_input_keeps_ids() {
    let line = ExamplePair::new("a b".into(), "a b".into(), 42, 7, 8, Provenance::Revision).to_json_line();
    let mut config = common::fixture_config();
    config.rtt.identity_fraction = 1.0;
    let mut out = Vec::new();
    run_build_rtt(&config, format!("{line}\n\n").as_bytes(), &[], &MockProvider::identity(), &mut out).unwrap();
    let pair: ExamplePair = serde_json::from_str(String::from_utf8(out).unwrap().trim()).unwrap();
    assert_eq!((pair.page_id, pair.older_rev, pair.newer_rev), (42, 7, 8));
    assert_eq!(pair.provenance, Provenance::RoundTrip);
}

#[test]
fn rules_mined_from_revision_golden() {
    let corpus = BufReader::new(File::open(common::fixture("extract_golden.jsonl")).unwrap());
    let rules = mine_edit_rules(corpus, &RuleExtractionConfig::default()).unwrap();
    assert!(!rules.is_empty());
    assert!(rules.iter().any(|r| r.original == "consider" && r.revised == "considered"));
    for r in &rules {
        assert_eq!(r.probability, r.count_joint as f64 / r.count_revised as f64);
    }
}

#[test]
fn http_provider_wire_format() {
    let (url, server) = common::serve(2, |body| {
        let v: serde_json::Value = serde_json::from_str(body).unwrap();
        let text = v["text"].as_str().unwrap().replace("color", "iro").replace("iro", "colour");
        (200, serde_json::json!({ "text": text }).to_string())
    });
    let provider = HttpProvider::new(format!("{url}/translate"), Some("s3cret".into()), Duration::from_secs(5));
    assert_eq!(round_trip("the color red", "ja", &provider).unwrap(), "the colour red");
    let seen = server.join().unwrap();
    let first: serde_json::Value = serde_json::from_str(&seen[0].body).unwrap();
    assert_eq!(first, serde_json::json!({"text": "the color red", "source": "en", "target": "ja"}));
    let second: serde_json::Value = serde_json::from_str(&seen[1].body).unwrap();
    assert_eq!((second["source"].as_str(), second["target"].as_str()), (Some("ja"), Some("en")));
    assert_eq!(seen[0].path, "/translate");
    assert_eq!(seen[0].headers.get("authorization").map(String::as_str), Some("Bearer s3cret"));
}

#[test]
fn http_provider_errors_are_provider_errors() {
    let (url, server) = common::serve(1, |_| (500, "{}".into()));
    let provider = HttpProvider::new(url, None, Duration::from_secs(5));
    assert!(matches!(provider.translate("x", "en", "fr"), Err(Error::Provider(_))));
    server.join().unwrap();
    let (url, server) = common::serve(1, |_| (200, "{\"translation\": 1}".into()));
    let provider = HttpProvider::new(url, None, Duration::from_secs(5));
    assert!(matches!(provider.translate("x", "en", "fr"), Err(Error::Provider(_))));
    server.join().unwrap();
}

#[test]
fn golden_corpus_counts() {
    // counted independently of the crate
    let stats = corpus_stats(common::read_fixture("rtt_golden.jsonl").as_bytes()).unwrap();
    assert_eq!((stats.sentences, stats.words, stats.source_words, stats.identities), (20, 155, 153, 8));
    let stats = corpus_stats(common::read_fixture("extract_golden.jsonl").as_bytes()).unwrap();
    assert_eq!((stats.sentences, stats.words, stats.source_words, stats.identities), (41, 184, 182, 25));
}
