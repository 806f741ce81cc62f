//! Byte-pair-encoding wordpieces.
//!
//! Words are split on whitespace and merged within the word only. A piece is
//! either word-initial, a continuation of the previous piece, or a run of
//! non-standard whitespace. A single space between two words is implied, so
//! ordinary text encodes to word pieces only while any input still decodes
//! back exactly.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const DEFAULT_VOCAB_SIZE: usize = 32_000;
const HEADER_PREFIX: &str = "#gecgen-bpe-merges v1";

/// Anything that can split text into countable units.
pub trait Segmenter {
    fn segment(&self, text: &str) -> Vec<String>;
}

/// Counts whitespace words; the fallback when no subword model is supplied.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceSegmenter;

impl Segmenter for WhitespaceSegmenter {
    fn segment(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_owned).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    Initial,
    Continuation,
    Space,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wordpiece {
    pub text: String,
    pub kind: PieceKind,
}

impl fmt::Display for Wordpiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PieceKind::Continuation => write!(f, "##{}", self.text),
            _ => f.write_str(&self.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordModel {
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
    vocab: BTreeSet<String>,
    vocab_size: usize,
}

impl SubwordModel {
    fn from_merges(merges: Vec<(String, String)>, mut vocab: BTreeSet<String>, vocab_size: usize) -> Self {
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, (l, r)) in merges.iter().enumerate() {
            ranks.entry((l.clone(), r.clone())).or_insert(rank);
            vocab.insert(l.clone());
            vocab.insert(r.clone());
            vocab.insert(format!("{l}{r}"));
        }
        SubwordModel { merges, ranks, vocab, vocab_size }
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Greedy BPE training: repeatedly merge the most frequent adjacent pair
    /// (ties broken lexicographically) until the vocabulary reaches
    /// `vocab_size` or no pair is left.
    pub fn train<I, S>(corpus: I, vocab_size: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut word_counts: HashMap<String, u64> = HashMap::new();
        for line in corpus {
            for word in line.as_ref().split_whitespace() {
                *word_counts.entry(word.to_owned()).or_default() += 1;
            }
        }
        if word_counts.is_empty() {
            return Err(Error::invalid("cannot train a subword model on an empty corpus"));
        }
        let mut vocab: BTreeSet<String> = BTreeSet::new();
        let mut words: Vec<(Vec<String>, u64)> = word_counts
            .into_iter()
            .map(|(w, c)| {
                let symbols: Vec<String> = w.chars().map(String::from).collect();
                vocab.extend(symbols.iter().cloned());
                (symbols, c)
            })
            .collect();
        words.sort();
        if vocab_size < vocab.len() {
            return Err(Error::invalid(format!(
                "vocab_size {vocab_size} is smaller than the {} base characters",
                vocab.len()
            )));
        }

        let mut counts: HashMap<(String, String), i64> = HashMap::new();
        let mut occurs: HashMap<(String, String), HashSet<usize>> = HashMap::new();
        for (idx, (symbols, count)) in words.iter().enumerate() {
            for pair in symbols.windows(2) {
                let key = (pair[0].clone(), pair[1].clone());
                *counts.entry(key.clone()).or_default() += *count as i64;
                occurs.entry(key).or_default().insert(idx);
            }
        }
        let mut queue: BTreeSet<(Reverse<i64>, String, String)> =
            counts.iter().filter(|(_, &c)| c > 0).map(|((l, r), &c)| (Reverse(c), l.clone(), r.clone())).collect();

        let mut merges = Vec::new();
        let base = vocab.clone();
        while vocab.len() < vocab_size {
            let Some((_, left, right)) = queue.pop_first() else { break };
            let merged = format!("{left}{right}");
            let key = (left.clone(), right.clone());
            let mut touched: Vec<usize> = occurs.get(&key).map(|s| s.iter().copied().collect()).unwrap_or_default();
            touched.sort_unstable();

            let mut deltas: HashMap<(String, String), i64> = HashMap::new();
            for idx in touched {
                let (symbols, count) = &mut words[idx];
                let count = *count as i64;
                for pair in symbols.windows(2) {
                    *deltas.entry((pair[0].clone(), pair[1].clone())).or_default() -= count;
                }
                *symbols = merge_symbols(symbols, &left, &right, &merged);
                for pair in symbols.windows(2) {
                    let k = (pair[0].clone(), pair[1].clone());
                    *deltas.entry(k.clone()).or_default() += count;
                    occurs.entry(k).or_default().insert(idx);
                }
            }
            for (k, d) in deltas {
                if d == 0 {
                    continue;
                }
                let c = counts.entry(k.clone()).or_default();
                if *c > 0 {
                    queue.remove(&(Reverse(*c), k.0.clone(), k.1.clone()));
                }
                *c += d;
                if *c > 0 {
                    queue.insert((Reverse(*c), k.0, k.1));
                }
            }
            vocab.insert(merged);
            merges.push((left, right));
        }
        Ok(SubwordModel::from_merges(merges, base, vocab_size))
    }

    fn encode_word(&self, word: &str) -> Vec<String> {
        let mut symbols: Vec<String> = word.chars().map(String::from).collect();
        loop {
            let best = symbols.windows(2).filter_map(|p| self.ranks.get(&(p[0].clone(), p[1].clone())).copied()).min();
            let Some(rank) = best else { break };
            let (l, r) = &self.merges[rank];
            symbols = merge_symbols(&symbols, l, r, &format!("{l}{r}"));
        }
        symbols
    }

    pub fn encode(&self, text: &str) -> Vec<Wordpiece> {
        let mut pieces = Vec::new();
        let mut rest = text;
        let mut first = true;
        while !rest.is_empty() {
            let ws_len = rest.len() - rest.trim_start().len();
            let (ws, after) = rest.split_at(ws_len);
            let word_len = after.find(char::is_whitespace).unwrap_or(after.len());
            let (word, tail) = after.split_at(word_len);
            let implied = !first && ws == " " && !word.is_empty();
            if !ws.is_empty() && !implied {
                pieces.push(Wordpiece { text: ws.to_owned(), kind: PieceKind::Space });
            }
            for (i, unit) in self.encode_word(word).into_iter().enumerate() {
                let kind = if i == 0 { PieceKind::Initial } else { PieceKind::Continuation };
                pieces.push(Wordpiece { text: unit, kind });
            }
            first = false;
            rest = tail;
        }
        pieces
    }

    pub fn decode(pieces: &[Wordpiece]) -> String {
        let mut out = String::new();
        let mut after_word = false;
        for piece in pieces {
            match piece.kind {
                PieceKind::Space => {
                    out.push_str(&piece.text);
                    after_word = false;
                }
                PieceKind::Initial => {
                    if after_word {
                        out.push(' ');
                    }
                    out.push_str(&piece.text);
                    after_word = true;
                }
                PieceKind::Continuation => {
                    out.push_str(&piece.text);
                    after_word = true;
                }
            }
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{HEADER_PREFIX} vocab_size={}", self.vocab_size)?;
        for (l, r) in &self.merges {
            writeln!(w, "{l} {r}")?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let vocab_size = header
            .strip_prefix(HEADER_PREFIX)
            .and_then(|rest| rest.trim().strip_prefix("vocab_size="))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::invalid(format!("not a subword model header: {header:?}")))?;
        let mut merges = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (l, r) = line
                .split_once(' ')
                .filter(|(l, r)| !l.is_empty() && !r.is_empty() && !r.contains(' '))
                .ok_or_else(|| Error::invalid(format!("bad merge on line {}: {line:?}", n + 2)))?;
            merges.push((l.to_owned(), r.to_owned()));
        }
        Ok(SubwordModel::from_merges(merges, BTreeSet::new(), vocab_size))
    }
}

fn merge_symbols(symbols: &[String], left: &str, right: &str, merged: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == left && symbols[i + 1] == right {
            out.push(merged.to_owned());
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

impl Segmenter for SubwordModel {
    fn segment(&self, text: &str) -> Vec<String> {
        self.encode(text).iter().map(ToString::to_string).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(pieces: &[Wordpiece]) -> Vec<&str> {
        pieces.iter().map(|p| p.text.as_str()).collect()
    }

    #[test]
    fn first_merge_is_most_frequent_pair() {
        // Pair counts over {"aaab": 2}: (a,a) = 4, (a,b) = 2.
        let model = SubwordModel::train(["aaab aaab"], 3).unwrap();
        assert_eq!(model.merges(), &[("a".to_owned(), "a".to_owned())]);
        assert_eq!(units(&model.encode("aaab")), ["aa", "a", "b"]);
        assert_eq!(model.segment("aaab"), ["aa", "##a", "##b"]);
    }

    #[test]
    fn lexicographic_tie_break() {
        // (a,b) and (c,d) both occur once.
        let model = SubwordModel::train(["ab cd"], 5).unwrap();
        assert_eq!(model.merges()[0], ("a".to_owned(), "b".to_owned()));
    }

    #[test]
    fn single_character_corpus_has_no_merges() {
        let model = SubwordModel::train(["a a a"], 10).unwrap();
        assert!(model.merges().is_empty());
    }

    #[test]
    fn vocab_smaller_than_alphabet_is_rejected() {
        assert!(SubwordModel::train(["abc"], 2).is_err());
        assert!(SubwordModel::train(Vec::<String>::new(), 10).is_err());
    }

    #[test]
    fn retraining_is_deterministic() {
        let corpus = ["the cat sat on the mat", "the dog sat on the log", "then they sang"];
        let a = SubwordModel::train(corpus, 40).unwrap();
        let b = SubwordModel::train(corpus, 40).unwrap();
        assert_eq!(a.merges(), b.merges());
    }

    #[test]
    fn known_words_encode_whole() {
        let model = SubwordModel::train(["cat cat dog dog"], 100).unwrap();
        assert_eq!(units(&model.encode("dog cat")), ["dog", "cat"]);
        assert!(model.encode("dog cat").iter().all(|p| p.kind == PieceKind::Initial));
    }

    #[test]
    fn unknown_characters_fall_back() {
        let model = SubwordModel::train(["aaab"], 3).unwrap();
        assert_eq!(units(&model.encode("zé")), ["z", "é"]);
    }

    #[test]
    fn whitespace_is_preserved() {
        let model = SubwordModel::train(["a b"], 2).unwrap();
        for text in ["", " ", "a  b", "\ta\nb ", "a b"] {
            assert_eq!(SubwordModel::decode(&model.encode(text)), text);
        }
        assert_eq!(model.encode("a b").len(), 2);
    }

    #[test]
    fn serialisation_round_trip() {
        let model = SubwordModel::train(["low lower lowest newer wider"], 30).unwrap();
        let mut buf = Vec::new();
        model.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#gecgen-bpe-merges v1 vocab_size=30\n"));
        let loaded = SubwordModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(loaded.merges(), model.merges());
        assert_eq!(loaded.encode("lowest newer"), model.encode("lowest newer"));
        assert!(SubwordModel::read_from("garbage\n".as_bytes()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_arbitrary_text(text in "\\PC{0,40}|[ \\ta-c\\n]{0,40}") {
                let model = SubwordModel::train(["abc abd bcd cab"], 12).unwrap();
                prop_assert_eq!(SubwordModel::decode(&model.encode(&text)), text);
            }

            #[test]
            fn larger_vocab_never_lengthens(words in prop::collection::vec("[a-e]{1,8}", 1..30), extra in 1usize..30) {
                let corpus = words.join(" ");
                let small = SubwordModel::train([&corpus], 5).unwrap_or_else(|_| SubwordModel::train([&corpus], 32).unwrap());
                let base = small.vocab_size();
                let large = SubwordModel::train([&corpus], base + extra).unwrap();
                prop_assert!(large.encode(&corpus).len() <= small.encode(&corpus).len());
            }
        }
    }
}
