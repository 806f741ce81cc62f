use crate::example::ExamplePair;
use crate::subword::Segmenter;
use crate::text::levenshtein;

pub const DEFAULT_MAX_WORDPIECES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVerdict {
    Keep,
    TooLong,
    TooManyEdits,
}

impl FilterVerdict {
    pub fn keep(self) -> bool {
        self == FilterVerdict::Keep
    }
}

/// Length and edit-distance filter, both measured in wordpieces.
pub fn filter_example(
    pair: &ExamplePair,
    max_wordpieces: usize,
    max_edit_distance: Option<usize>,
    segmenter: &impl Segmenter,
) -> FilterVerdict {
    let source = segmenter.segment(&pair.source);
    if source.len() > max_wordpieces {
        return FilterVerdict::TooLong;
    }
    let target = segmenter.segment(&pair.target);
    if target.len() > max_wordpieces {
        return FilterVerdict::TooLong;
    }
    if let Some(limit) = max_edit_distance {
        if !pair.is_identity && levenshtein(&source, &target) > limit {
            return FilterVerdict::TooManyEdits;
        }
    }
    FilterVerdict::Keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::Provenance;
    use crate::subword::WhitespaceSegmenter;

    fn pair(source: String, target: String) -> ExamplePair {
        ExamplePair::new(source, target, 0, 0, 0, Provenance::Revision)
    }

    fn words(n: usize, stem: &str) -> String {
        (0..n).map(|i| format!("{stem}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn length_boundary() {
        let seg = WhitespaceSegmenter;
        assert_eq!(filter_example(&pair(words(3, "a"), words(257, "b")), 256, None, &seg), FilterVerdict::TooLong);
        assert_eq!(filter_example(&pair(words(256, "a"), words(256, "b")), 256, None, &seg), FilterVerdict::Keep);
    }

    #[test]
    fn identity_passes_edit_limit() {
        let s = words(20, "w");
        assert!(filter_example(&pair(s.clone(), s), 256, Some(6), &WhitespaceSegmenter).keep());
    }

    #[test]
    fn seven_substitutions_exceed_six() {
        let source = words(10, "w");
        let mut target: Vec<String> = source.split(' ').map(String::from).collect();
        for t in target.iter_mut().take(7) {
            t.push('x');
        }
        let target = target.join(" ");
        // brute-force oracle: equal lengths, positionwise mismatches bound the
        // distance from above, and any alignment needs at least 7 changes
        // because the 7 altered tokens occur nowhere in the source.
        assert_eq!(levenshtein(&tokens(&source), &tokens(&target)), 7);
        let p = pair(source, target);
        assert_eq!(filter_example(&p, 256, Some(6), &WhitespaceSegmenter), FilterVerdict::TooManyEdits);
        assert!(filter_example(&p, 256, Some(7), &WhitespaceSegmenter).keep());
        assert!(filter_example(&p, 256, None, &WhitespaceSegmenter).keep());
    }

    fn tokens(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }
}
