use std::collections::HashMap;
use std::hash::Hash;

pub const DEFAULT_MAX_ORDER: usize = 4;

/// Sufficient statistics: hypothesis length, reference length, then a
/// (numerator, denominator) pair per n-gram order.
#[derive(Debug, Clone, PartialEq)]
pub struct GleuStats(pub Vec<f64>);

impl GleuStats {
    fn zero(max_n: usize) -> Self {
        GleuStats(vec![0.0; 2 + 2 * max_n])
    }

    fn add(&mut self, other: &GleuStats) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Combined score. With `smooth`, zero statistics count as one.
    pub fn score(&self, smooth: bool) -> f64 {
        let stats: Vec<f64> = self.0.iter().map(|&x| if smooth && x == 0.0 { 1.0 } else { x }).collect();
        if stats.contains(&0.0) {
            return 0.0;
        }
        let (c, r) = (stats[0], stats[1]);
        let orders = (stats.len() - 2) / 2;
        let log_precision: f64 = stats[2..].chunks(2).map(|p| (p[0] / p[1]).ln()).sum::<f64>() / orders as f64;
        ((1.0 - r / c).min(0.0) + log_precision).exp()
    }
}

fn counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut out = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *out.entry(w).or_default() += 1;
        }
    }
    out
}

fn overlap<T: Eq + Hash>(a: &HashMap<&[T], usize>, b: &HashMap<&[T], usize>) -> usize {
    a.iter().map(|(k, &c)| c.min(b.get(k).copied().unwrap_or(0))).sum()
}

fn reference_stats<T: Eq + Hash>(source: &[T], hypothesis: &[T], reference: &[T], max_n: usize) -> GleuStats {
    let mut stats = vec![hypothesis.len() as f64, reference.len() as f64];
    for n in 1..=max_n {
        let h = counts(hypothesis, n);
        let r = counts(reference, n);
        let mut source_only = counts(source, n);
        source_only.retain(|k, _| !r.contains_key(k));
        let rewarded = overlap(&h, &r);
        let penalised = overlap(&h, &source_only);
        stats.push(rewarded.saturating_sub(penalised) as f64);
        stats.push((hypothesis.len() + 1).saturating_sub(n) as f64);
    }
    GleuStats(stats)
}

/// Statistics averaged over the references.
pub fn gleu_stats<T: Eq + Hash, R: AsRef<[T]>>(
    source: &[T],
    hypothesis: &[T],
    references: &[R],
    max_n: usize,
) -> GleuStats {
    let mut total = GleuStats::zero(max_n);
    for r in references {
        total.add(&reference_stats(source, hypothesis, r.as_ref(), max_n));
    }
    let k = references.len().max(1) as f64;
    for x in &mut total.0 {
        *x /= k;
    }
    total
}

/// Sentence-level GLEU with zero statistics smoothed.
pub fn gleu<T: Eq + Hash, R: AsRef<[T]>>(source: &[T], hypothesis: &[T], references: &[R], max_n: usize) -> f64 {
    if hypothesis.is_empty() || references.is_empty() {
        return 0.0;
    }
    gleu_stats(source, hypothesis, references, max_n).score(true)
}

/// Corpus-level GLEU: statistics summed over sentences, no smoothing.
/// Each item is (source, hypothesis, references).
pub fn corpus_gleu<T: Eq + Hash, R: AsRef<[T]>>(items: &[(&[T], &[T], &[R])], max_n: usize) -> f64 {
    let mut total = GleuStats::zero(max_n);
    for (s, h, refs) in items {
        total.add(&gleu_stats(s, h, refs, max_n));
    }
    total.score(false)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn exact_matches() {
        let s = toks("the cat sat");
        assert_eq!(gleu(&s, &s, std::slice::from_ref(&s), 4), 1.0);
        assert_eq!(gleu(&s, &toks("the cat sits"), &[toks("the cat sits")], 4), 1.0);
    }

    #[test]
    fn source_copy_is_penalised() {
        let s = toks("she go home now");
        let r = toks("she goes home now");
        assert!(gleu(&s, &s, std::slice::from_ref(&r), 4) < gleu(&s, &r, std::slice::from_ref(&r), 4));
    }

    #[test]
    fn stats_by_hand() {
        let st = gleu_stats(&toks("she go home now"), &toks("he go home now"), &[toks("she goes home now")], 4);
        assert_eq!(st.0, vec![4.0, 4.0, 1.0, 4.0, 0.0, 3.0, 0.0, 2.0, 0.0, 1.0]);
    }

    #[test]
    fn degenerate() {
        let s = toks("a b");
        assert_eq!(gleu(&s, &[], std::slice::from_ref(&s), 4), 0.0);
        assert_eq!(gleu::<&str, Vec<&str>>(&s, &s, &[], 4), 0.0);
        let none: [(&[&str], &[&str], &[Vec<&str>]); 0] = [];
        assert_eq!(corpus_gleu(&none, 4), 0.0);
    }

    #[test]
    fn corpus_level() {
        let s = toks("a b c d e");
        let r = [toks("a b c d e")];
        let items = [(&s[..], &s[..], &r[..]), (&s[..], &s[..], &r[..])];
        assert_eq!(corpus_gleu(&items, 4), 1.0);
    }

    proptest! {
        #[test]
        fn reference_itself_scores_one(r in prop::collection::vec("[a-e]", 1..15), s in prop::collection::vec("[a-e]", 0..15)) {
            prop_assert_eq!(gleu(&s, &r, std::slice::from_ref(&r), 4), 1.0);
        }

        #[test]
        fn permutation_invariant(
            s in prop::collection::vec("[a-c]", 0..8),
            h in prop::collection::vec("[a-c]", 1..8),
            refs in prop::collection::vec(prop::collection::vec("[a-c]", 1..8), 1..5),
        ) {
            let mut rev = refs.clone();
            rev.reverse();
            prop_assert_eq!(gleu(&s, &h, &refs, 4), gleu(&s, &h, &rev, 4));
        }
    }
}
