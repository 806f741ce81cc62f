//! Acceptance gate. Prints one PASS/FAIL line per criterion, then fails if
//! any criterion failed.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gecgen::decode::{iterative_decode_traced, DecodeConfig};
use gecgen::ingest::sampled_pair_count;
use gecgen::metrics::{apply_edits, extract_edits, f_beta, gleu, gleu_stats};
use gecgen::noise::{
    corrupt_spelling_counted, downsample_identities, extract_edit_rules, RuleExtractionConfig, SpellNoiseConfig,
};
use gecgen::pipeline::{load_mock_table, read_edit_rules, run_build_rtt, run_extract_revisions};
use gecgen::rng::rng_for;
use gecgen::rtt::MockProvider;
use gecgen::subword::WhitespaceSegmenter;
use gecgen::{ExamplePair, Provenance};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Published (precision, recall, F0.5) rows, in percent.
const PUBLISHED_ROWS: [(&str, f64, f64, f64); 36] = [
    ("rtt French", 33.6, 21.9, 30.3),
    ("rtt German", 36.4, 21.2, 31.8),
    ("rtt Russian", 33.5, 21.1, 30.0),
    ("rtt Japanese", 35.7, 51.3, 38.1),
    ("rtt All", 38.1, 27.1, 35.2),
    ("rtt+ft French", 57.9, 39.9, 53.1),
    ("rtt+ft German", 56.4, 42.1, 52.8),
    ("rtt+ft Russian", 60.8, 32.5, 51.7),
    ("rtt+ft Japanese", 60.9, 38.6, 54.6),
    ("rtt+ft All", 62.1, 40.0, 56.0),
    ("rtt Lang-8 only", 41.2, 16.4, 31.7),
    ("combine Revisions All", 64.5, 36.2, 55.8),
    ("combine Revisions Ensemble(4)", 66.3, 42.3, 59.0),
    ("combine RTT All", 62.1, 40.0, 56.0),
    ("combine RTT Ensemble(4)", 63.5, 47.0, 59.3),
    ("combine Both All", 65.8, 35.2, 56.1),
    ("combine Both Ensemble(8)", 66.7, 43.9, 60.4),
    ("revisions Default", 62.7, 24.3, 47.7),
    ("revisions Max-edit-28", 57.3, 28.0, 47.4),
    ("revisions Max-edit-6", 58.3, 25.7, 46.5),
    ("revisions Dwnsample-1.35", 47.0, 35.1, 44.0),
    ("revisions All", 58.3, 25.1, 46.1),
    ("revisions+ft Default", 68.8, 32.3, 56.1),
    ("revisions+ft Max-edit-28", 59.6, 40.9, 54.6),
    ("revisions+ft Max-edit-6", 65.5, 37.1, 56.8),
    ("revisions+ft Dwnsample-1.35", 62.7, 39.9, 56.3),
    ("revisions+ft All", 64.5, 36.2, 55.8),
    ("revisions Lang-8 only", 41.2, 16.4, 31.7),
    ("decoding Revision single-shot", 60.4, 19.2, 42.2),
    ("decoding Revision iterative", 58.3, 25.1, 46.1),
    ("decoding Revision+ft single-shot", 67.7, 28.1, 52.8),
    ("decoding Revision+ft iterative", 64.5, 36.2, 55.8),
    ("decoding RTT single-shot", 47.1, 21.4, 38.0),
    ("decoding RTT iterative", 47.1, 21.4, 38.0),
    ("decoding RTT+ft single-shot", 66.7, 31.8, 54.7),
    ("decoding RTT+ft iterative", 64.4, 38.4, 56.7),
];

fn published_f05() -> Verdict {
    let mut misses = Vec::new();
    for (name, p, r, f) in PUBLISHED_ROWS {
        let got = 100.0 * f_beta(p / 100.0, r / 100.0, 0.5);
        if (got - f).abs() > 0.2 + 1e-9 {
            // Widest value reachable by any unrounded P, R behind the printed ones.
            let corners = [(-0.05, -0.05), (-0.05, 0.05), (0.05, -0.05), (0.05, 0.05)];
            let reach: Vec<f64> =
                corners.iter().map(|(dp, dr)| 100.0 * f_beta((p + dp) / 100.0, (r + dr) / 100.0, 0.5)).collect();
            let lo = reach.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = reach.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            misses.push(format!("{name}: P={p} R={r} gives {got:.2} (reachable {lo:.2}..{hi:.2}), published {f}"));
        }
    }
    let ok = PUBLISHED_ROWS.len() - misses.len();
    let mut detail = format!("{ok}/{} rows within 0.2", PUBLISHED_ROWS.len());
    if !misses.is_empty() {
        detail.push_str(&format!("; off: {}", misses.join("; ")));
    }
    verdict(misses.is_empty(), detail)
}

fn pizza_trajectory() -> Verdict {
    let config = DecodeConfig { beam: 4, threshold: 0.9, max_iter: 10 };
    let out = match iterative_decode_traced(common::PIZZA[0], &common::PizzaScorer::new(), &config) {
        Ok(out) => out,
        Err(e) => return verdict(false, e.to_string()),
    };
    let exact = out.trajectory == common::PIZZA;
    let fixpoint = out.iterations < config.max_iter && out.output == common::PIZZA[4];
    verdict(
        exact && fixpoint,
        format!("{} states, {} scorer calls, final {:?}", out.trajectory.len(), out.iterations, out.output),
    )
}

fn sampling_law() -> Verdict {
    let mut misses = 0u64;
    let mut first = None;
    for base in [1.5f64, 1.35] {
        for n in 1..=1_000_000u64 {
            let direct = if n < 2 { 0 } else { ((n as f64).log(base).floor() as u64).min(n - 1) };
            let got = sampled_pair_count(n, base);
            if got != direct {
                misses += 1;
                first.get_or_insert((base, n, got, direct));
            }
        }
    }
    let detail = match first {
        None => "2,000,000 (n, base) points agree".to_owned(),
        Some((b, n, got, want)) => format!("{misses} disagreements, first base={b} n={n}: {got} vs {want}"),
    };
    verdict(misses == 0, detail)
}

fn corruption_statistics() -> Verdict {
    let config = SpellNoiseConfig::revision();
    let p = config.rate;
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz ".chars().collect();
    let mut text_rng = ChaCha8Rng::seed_from_u64(7);
    let (mut trials, mut triggers) = (0usize, 0usize);
    for run in 0..1_000u64 {
        let text: String = (0..10_000).map(|_| *alphabet.choose(&mut text_rng).unwrap()).collect();
        let (_, counts) = corrupt_spelling_counted(&text, &config, &mut rng_for(2019, &[run]));
        trials += counts.trials;
        triggers += counts.triggers;
    }
    let mean = trials as f64 * p;
    let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
    let z = (triggers as f64 - mean) / sigma;
    let rate_ok = z.abs() <= 3.0;

    let total = 1_000_000u64;
    let stream = (0..total).map(|i| {
        let target = format!("sentence {i}");
        let source = if i % 5 == 0 { format!("sentance {i}") } else { target.clone() };
        ExamplePair::new(source, target, i, 0, 0, Provenance::Revision)
    });
    let (mut kept, mut identities) = (0u64, 0u64);
    for pair in downsample_identities(stream, 0.01, 2019) {
        kept += 1;
        identities += pair.is_identity as u64;
    }
    let share = 100.0 * identities as f64 / kept as f64;
    let share_ok = (share - 3.85).abs() <= 0.3;
    verdict(
        rate_ok && share_ok,
        format!("{triggers} triggers in {trials} draws (z={z:.2}); identity share {share:.3}% of {kept} kept"),
    )
}

/// Fifty pairs built from known substitutions, so every extracted edit is
/// known in advance.
fn rule_corpus() -> (Vec<(String, String)>, BTreeMap<(String, String), u64>) {
    const SUBS: [(&str, &str); 8] = [
        ("teh", "the"),
        ("alot", "a lot"),
        ("their", "there"),
        ("its", "it's"),
        ("loose", "lose"),
        ("then", "than"),
        ("wich", "which"),
        ("definately", "definitely"),
    ];
    const FILLER: [&str; 12] =
        ["cat", "dog", "sat", "on", "mat", "we", "saw", "big", "red", "house", "today", "Monday"];
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut joint = BTreeMap::new();
    let mut pairs = Vec::new();
    for i in 0..50 {
        let mut src: Vec<String> = Vec::new();
        let mut tgt: Vec<String> = Vec::new();
        let push_filler = |src: &mut Vec<String>, tgt: &mut Vec<String>, rng: &mut ChaCha8Rng| {
            for _ in 0..rng.gen_range(1..4) {
                let w = FILLER.choose(rng).unwrap().to_string();
                src.push(w.clone());
                tgt.push(w);
            }
        };
        push_filler(&mut src, &mut tgt, &mut rng);
        // Pairs 45.. are identities; the rest carry one or two edits and
        // sometimes an untouched occurrence of a revised phrase.
        let edits = if i >= 45 { 0 } else { rng.gen_range(1..=2) };
        for _ in 0..edits {
            let (wrong, right) = *SUBS.choose(&mut rng).unwrap();
            src.extend(wrong.split(' ').map(String::from));
            tgt.extend(right.split(' ').map(String::from));
            *joint.entry((wrong.to_owned(), right.to_owned())).or_insert(0) += 1;
            push_filler(&mut src, &mut tgt, &mut rng);
        }
        if rng.gen_bool(0.5) {
            let (_, right) = *SUBS.choose(&mut rng).unwrap();
            src.extend(right.split(' ').map(String::from));
            tgt.extend(right.split(' ').map(String::from));
            push_filler(&mut src, &mut tgt, &mut rng);
        }
        pairs.push((src.join(" "), tgt.join(" ")));
    }
    (pairs, joint)
}

fn count_occurrences(haystack: &[&str], needle: &[&str]) -> u64 {
    (0..haystack.len())
        .filter(|&i| haystack[i..].len() >= needle.len() && haystack[i..i + needle.len()] == *needle)
        .count() as u64
}

fn char_distance(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut row = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            row[j] = sub.min(prev[j] + 1).min(row[j - 1] + 1);
        }
        prev = row;
    }
    prev[b.len()]
}

fn edit_rule_probabilities() -> Verdict {
    let (pairs, joint) = rule_corpus();
    let rules = extract_edit_rules(pairs.iter().map(|(s, t)| (s, t)), &RuleExtractionConfig::default());
    let mut oracle = BTreeMap::new();
    for ((original, revised), c_joint) in &joint {
        let longest = original.chars().count().max(revised.chars().count());
        if 2 * char_distance(original, revised) > longest {
            continue;
        }
        let needle: Vec<&str> = revised.split(' ').collect();
        let c_revised: u64 =
            pairs.iter().map(|(_, t)| count_occurrences(&t.split(' ').collect::<Vec<_>>(), &needle)).sum();
        oracle.insert((original.clone(), revised.clone()), *c_joint as f64 / c_revised as f64);
    }
    let got: BTreeMap<(String, String), f64> =
        rules.iter().map(|r| ((r.original.clone(), r.revised.clone()), r.probability)).collect();
    verdict(
        got == oracle,
        format!(
            "{} rules from {} pairs, oracle has {} ({} designed edit kinds filtered as too distant)",
            got.len(),
            pairs.len(),
            oracle.len(),
            joint.len() - oracle.len()
        ),
    )
}

/// Sentence GLEU computed from raw n-gram counts, independently of the
/// library implementation.
fn gleu_oracle(source: &[&str], hypothesis: &[&str], reference: &[&str], smooth: bool) -> f64 {
    fn grams<'a>(t: &[&'a str], n: usize) -> HashMap<Vec<&'a str>, i64> {
        let mut m = HashMap::new();
        for w in t.windows(n) {
            *m.entry(w.to_vec()).or_insert(0) += 1;
        }
        m
    }
    let mut stats = vec![hypothesis.len() as f64, reference.len() as f64];
    for n in 1..=4 {
        let (h, s, r) = (grams(hypothesis, n), grams(source, n), grams(reference, n));
        let hr: i64 = h.iter().map(|(g, c)| (*c).min(*r.get(g).unwrap_or(&0))).sum();
        let h_penalised: i64 = h
            .iter()
            .map(|(g, c)| {
                let only_source = (s.get(g).unwrap_or(&0) - r.get(g).unwrap_or(&0)).max(0);
                (*c).min(only_source)
            })
            .sum();
        stats.push((hr - h_penalised).max(0) as f64);
        stats.push((hypothesis.len() as i64 + 1 - n as i64).max(0) as f64);
    }
    if smooth {
        stats.iter_mut().filter(|x| **x == 0.0).for_each(|x| *x = 1.0);
    }
    if stats.contains(&0.0) {
        return 0.0;
    }
    let brevity = (1.0 - stats[1] / stats[0]).min(0.0);
    let log_p: f64 = (0..4).map(|k| (stats[2 + 2 * k] / stats[3 + 2 * k]).ln()).sum::<f64>() / 4.0;
    (brevity + log_p).exp()
}

fn metric_laws() -> Verdict {
    let vocab = ["a", "b", "c", "d", "e", "f"];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sentence = |rng: &mut ChaCha8Rng, lo: usize| -> Vec<&str> {
        (0..rng.gen_range(lo..20)).map(|_| *vocab.choose(rng).unwrap()).collect()
    };
    let mut round_trip_fail = 0;
    for _ in 0..10_000 {
        let (s, h) = (sentence(&mut rng, 0), sentence(&mut rng, 0));
        match apply_edits(&s, &extract_edits(&s, &h)) {
            Ok(back) if back == h => {}
            _ => round_trip_fail += 1,
        }
    }
    let mut gleu_fail = 0;
    for _ in 0..1_000 {
        let (s, r) = (sentence(&mut rng, 0), sentence(&mut rng, 1));
        if gleu(&s, &r, std::slice::from_ref(&r), 4) != 1.0 {
            gleu_fail += 1;
        }
    }
    let src = ["she", "go", "home", "now"];
    let reference = ["she", "goes", "home", "now"];
    let hyp = ["he", "go", "home", "now"];
    const TOY_GOLDEN: f64 = 0.4518010018049224;
    let lib = gleu(&src, &hyp, &[reference], 4);
    let oracle = gleu_oracle(&src, &hyp, &reference, true);
    let stats_ok = gleu_stats(&src, &hyp, &[reference], 4).0 == [4.0, 4.0, 1.0, 4.0, 0.0, 3.0, 0.0, 2.0, 0.0, 1.0];
    let toy_ok = (lib - TOY_GOLDEN).abs() <= 1e-9 && (oracle - TOY_GOLDEN).abs() <= 1e-9 && stats_ok;
    verdict(
        round_trip_fail == 0 && gleu_fail == 0 && toy_ok,
        format!(
            "round-trip failures {round_trip_fail}/10000, gleu(s,r,[r])!=1 {gleu_fail}/1000, toy {lib:.16} (oracle {oracle:.16})"
        ),
    )
}

fn end_to_end_determinism() -> Verdict {
    let dump = common::read_fixture("mini_dump.xml");
    let clean = common::read_fixture("clean_sentences.txt");
    let rules = read_edit_rules(common::read_fixture("rtt_rules.jsonl").as_bytes()).unwrap();
    let provider = MockProvider::new(load_mock_table(&common::fixture("mock_table.json")).unwrap());
    let extract_golden = common::read_fixture("extract_golden.jsonl");
    let rtt_golden = common::read_fixture("rtt_golden.jsonl");
    let mut mismatches = Vec::new();
    for workers in [1, 8, 1, 8] {
        let mut config = common::fixture_config();
        config.workers = workers;
        let mut out = Vec::new();
        run_extract_revisions(&config, dump.as_bytes(), &mut out, None, &WhitespaceSegmenter).unwrap();
        if out != extract_golden.as_bytes() {
            mismatches.push(format!("extract-revisions workers={workers}"));
        }
        let mut out = Vec::new();
        run_build_rtt(&config, clean.as_bytes(), &rules, &provider, &mut out).unwrap();
        if out != rtt_golden.as_bytes() {
            mismatches.push(format!("build-rtt workers={workers}"));
        }
    }
    let detail = if mismatches.is_empty() {
        "both goldens byte-identical over two runs at workers 1 and 8".to_owned()
    } else {
        format!("mismatch: {}", mismatches.join(", "))
    };
    verdict(mismatches.is_empty(), detail)
}

#[test]
fn acceptance() {
    type Check = fn() -> Verdict;
    let criteria: [(&str, Check); 7] = [
        ("1 published F0.5 arithmetic", published_f05),
        ("2 iterative decoding trajectory", pizza_trajectory),
        ("3 revision sampling law", sampling_law),
        ("4 corruption statistics", corruption_statistics),
        ("5 edit-rule probabilities", edit_rule_probabilities),
        ("6 metric laws", metric_laws),
        ("7 end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("{status} [{name}] {} ({:.2?})", v.detail, start.elapsed());
        if !v.pass {
            failed.push(name);
        }
    }
    println!(
        "INFO [8 trained-model results] not reproducible here: absolute scores and curves need large trained \
         translation models and a full revision dump; covered instead by the oracle suites above and the \
         tune-threshold harness"
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
