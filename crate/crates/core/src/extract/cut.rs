use rand::Rng;

use super::align::AlignmentSpan;
use crate::example::{ExamplePair, Provenance};
use crate::rng;

/// Mean segment length of about fifty words.
pub const DEFAULT_CUT_PROBABILITY: f64 = 0.02;

/// Where a revision pair came from; copied onto every example cut from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairOrigin {
    pub page_id: u64,
    pub older_rev: u64,
    pub newer_rev: u64,
}

/// A boundary between tokens, as a position in both token sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Boundary {
    old: usize,
    new: usize,
}

fn eligible_boundaries(spans: &[AlignmentSpan]) -> Vec<Boundary> {
    let mut out = Vec::new();
    let last = spans.len().saturating_sub(1);
    for (idx, span) in spans.iter().enumerate() {
        if !span.is_matched() {
            continue;
        }
        let len = span.old.len();
        // Interior boundaries always qualify; the span's outer edges only
        // when they coincide with the start or end of the text.
        for off in 0..=len {
            if off == 0 && idx != 0 || off == len && idx != last {
                continue;
            }
            out.push(Boundary { old: span.old.start + off, new: span.new.start + off });
        }
    }
    out
}

/// Cuts aligned text at randomly selected boundaries inside matched spans.
///
/// Each eligible boundary is kept independently with probability `p_cut`.
/// Consecutive kept boundaries delimit one example: the older tokens between
/// them form the source, the newer tokens the target, including whatever
/// unmatched material lies in between.
pub fn cut_examples<T: AsRef<str>>(
    spans: &[AlignmentSpan],
    old_tokens: &[T],
    new_tokens: &[T],
    p_cut: f64,
    seed: u64,
    origin: PairOrigin,
    provenance: Provenance,
) -> Vec<ExamplePair> {
    let p_cut = p_cut.clamp(0.0, 1.0);
    let mut rng = rng::rng_for(seed, &[rng::stream::CUTTING]);
    let cuts: Vec<Boundary> = eligible_boundaries(spans).into_iter().filter(|_| rng.gen_bool(p_cut)).collect();

    cuts.windows(2)
        .filter_map(|w| {
            let source = join(&old_tokens[w[0].old..w[1].old]);
            let target = join(&new_tokens[w[0].new..w[1].new]);
            if source.is_empty() && target.is_empty() {
                return None;
            }
            Some(ExamplePair::new(source, target, origin.page_id, origin.older_rev, origin.newer_rev, provenance))
        })
        .collect()
}

fn join<T: AsRef<str>>(tokens: &[T]) -> String {
    let mut out = String::new();
    for t in tokens {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}
